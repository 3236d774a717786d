// Copyright 2026 The LAE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lae::trainers {

struct EpochRecord {
  std::size_t epoch = 0;
  /// Mean training objective per datapoint over the epoch's minibatches.
  double mean_potential = 0.0;
  /// Held-out negative ELBO in nats per data dimension.
  double neg_elbo_per_dim = 0.0;
  double neg_elbo_stderr = 0.0;
  /// Fraction of accepted Langevin proposals; 0 when no sampler ran.
  double acceptance_rate = 0.0;
  double seconds = 0.0;
};

class TrainReport {
 public:
  explicit TrainReport(std::string method) : method_(std::move(method)) {}

  /// Throws ContractError unless `r.epoch` follows the previous row.
  void add(const EpochRecord& r);
  const std::vector<EpochRecord>& rows() const { return rows_; }
  const std::string& method() const { return method_; }

  void write_csv(std::ostream& os) const;
  void write_csv(const std::filesystem::path& path) const;
  /// The single progress line printed after an epoch.
  static std::string progress_line(const std::string& method, const EpochRecord& r);

 private:
  std::string method_;
  std::vector<EpochRecord> rows_;
};

}  // namespace lae::trainers
