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
#include <span>
#include <vector>

#include "lae/common/types.hpp"
#include "lae/samplers/langevin.hpp"

namespace lae::samplers {

/// Per-datapoint sample sets Z^(1..n) in step order. Entry t of every list
/// was produced by the same sampler step; entries at or after `burn_in` are
/// the usable samples.
class SampleStore {
 public:
  SampleStore(std::size_t datapoints, std::size_t latent_dim, std::size_t burn_in);

  /// Append one step: row i of `z` extends the list of datapoint i.
  void append(const Matrix& z, bool accepted);
  /// As above with a separate accept flag per datapoint.
  void append(const Matrix& z, std::span<const char> accepted);

  std::size_t datapoints() const { return n_; }
  std::size_t latent_dim() const { return d_z_; }
  std::size_t burn_in() const { return burn_in_; }
  std::size_t steps() const { return accepted_.size() / n_; }
  std::size_t usable() const { return steps() > burn_in_ ? steps() - burn_in_ : 0; }

  /// Samples of datapoint i, shape [steps x d_z] (post burn-in by default).
  Matrix samples(std::size_t i, bool after_burn_in = true) const;
  /// Accept flag of datapoint i at step t.
  bool accepted(std::size_t t, std::size_t i) const { return accepted_[t * n_ + i] != 0; }

  MhStats& stats() { return stats_; }
  const MhStats& stats() const { return stats_; }

  /// Columns step, datapoint_index, z_0..z_{d_z-1}, accepted; all steps.
  void write_csv(std::ostream& os) const;
  void write_csv(const std::filesystem::path& path) const;
  /// Short plain-text acceptance summary.
  void write_report(std::ostream& os) const;

  /// Concatenate stores of equal length and burn-in along the datapoint axis.
  static SampleStore merge(std::span<const SampleStore> parts);

 private:
  std::size_t n_, d_z_, burn_in_;
  // Step-major: values_[(t * n_ + i) * d_z_ + k], accepted_[t * n_ + i].
  std::vector<double> values_;
  std::vector<char> accepted_;
  MhStats stats_;
};

}  // namespace lae::samplers
