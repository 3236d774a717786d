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

#include "lae/trainers/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "lae/common/error.hpp"

namespace lae::trainers {

void TrainReport::add(const EpochRecord& r) {
  const std::size_t expected = rows_.empty() ? 1 : rows_.back().epoch + 1;
  if (r.epoch != expected) {
    throw ContractError("report rows must be indexed by consecutive epochs starting at 1");
  }
  rows_.push_back(r);
}

void TrainReport::write_csv(std::ostream& os) const {
  os << "method,epoch,mean_potential,neg_elbo_per_dim,neg_elbo_stderr,acceptance_rate,seconds\n";
  char buf[256];
  for (const auto& r : rows_) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.3f\n", method_.c_str(), r.epoch,
                  r.mean_potential, r.neg_elbo_per_dim, r.neg_elbo_stderr, r.acceptance_rate, r.seconds);
    os << buf;
  }
}

void TrainReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_csv(os);
}

std::string TrainReport::progress_line(const std::string& method, const EpochRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "[%s] epoch %zu  loss/pt %.4f  neg-elbo/dim %.5f (+-%.5f)  accept %.3f  %.1fs",
                method.c_str(), r.epoch, r.mean_potential, r.neg_elbo_per_dim, r.neg_elbo_stderr,
                r.acceptance_rate, r.seconds);
  return buf;
}

}  // namespace lae::trainers
