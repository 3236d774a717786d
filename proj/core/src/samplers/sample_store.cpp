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

#include "lae/samplers/sample_store.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "lae/common/error.hpp"

namespace lae::samplers {

SampleStore::SampleStore(std::size_t datapoints, std::size_t latent_dim, std::size_t burn_in)
    : n_(datapoints), d_z_(latent_dim), burn_in_(burn_in) {
  if (n_ == 0 || d_z_ == 0) throw ConfigError("sample store needs n >= 1 and d_z >= 1");
}

void SampleStore::append(const Matrix& z, bool accepted) {
  const std::vector<char> flags(n_, accepted ? 1 : 0);
  append(z, flags);
}

void SampleStore::append(const Matrix& z, std::span<const char> accepted) {
  if (accepted.size() != n_) throw DimensionError("one accept flag per datapoint expected");
  if (static_cast<std::size_t>(z.rows()) != n_ || static_cast<std::size_t>(z.cols()) != d_z_) {
    throw DimensionError("sample store expects [" + std::to_string(n_) + " x " +
                         std::to_string(d_z_) + "] per step");
  }
  values_.insert(values_.end(), z.data(), z.data() + z.size());
  accepted_.insert(accepted_.end(), accepted.begin(), accepted.end());
}

Matrix SampleStore::samples(std::size_t i, bool after_burn_in) const {
  if (i >= n_) throw DimensionError("datapoint index out of range");
  const std::size_t first = after_burn_in ? std::min(burn_in_, steps()) : 0;
  Matrix out(static_cast<Eigen::Index>(steps() - first), static_cast<Eigen::Index>(d_z_));
  for (std::size_t t = first; t < steps(); ++t) {
    const double* src = values_.data() + (t * n_ + i) * d_z_;
    std::copy(src, src + d_z_, out.row(static_cast<Eigen::Index>(t - first)).data());
  }
  return out;
}

void SampleStore::write_csv(std::ostream& os) const {
  os << "step,datapoint_index";
  for (std::size_t k = 0; k < d_z_; ++k) os << ",z_" << k;
  os << ",accepted\n";
  char buf[32];
  for (std::size_t t = 0; t < steps(); ++t) {
    for (std::size_t i = 0; i < n_; ++i) {
      os << t << ',' << i;
      const double* src = values_.data() + (t * n_ + i) * d_z_;
      for (std::size_t k = 0; k < d_z_; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", src[k]);
        os << ',' << buf;
      }
      os << ',' << static_cast<int>(accepted_[t * n_ + i]) << '\n';
    }
  }
}

void SampleStore::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_csv(os);
}

void SampleStore::write_report(std::ostream& os) const {
  os << "datapoints: " << n_ << '\n'
     << "latent_dim: " << d_z_ << '\n'
     << "steps: " << steps() << '\n'
     << "burn_in: " << burn_in_ << '\n'
     << "proposed: " << stats_.proposed << '\n'
     << "accepted: " << stats_.accepted << '\n'
     << "nonfinite: " << stats_.nonfinite << '\n'
     << "acceptance_rate: " << stats_.acceptance_rate() << '\n';
}

SampleStore SampleStore::merge(std::span<const SampleStore> parts) {
  if (parts.empty()) throw ContractError("merge of zero sample stores");
  std::size_t n = 0;
  for (const auto& p : parts) {
    if (p.steps() != parts[0].steps() || p.burn_in_ != parts[0].burn_in_ || p.d_z_ != parts[0].d_z_) {
      throw DimensionError("merged sample stores must share length, burn-in and latent dimension");
    }
    n += p.n_;
  }
  SampleStore out(n, parts[0].d_z_, parts[0].burn_in_);
  const std::size_t d = out.d_z_;
  out.values_.reserve(n * d * parts[0].steps());
  for (std::size_t t = 0; t < parts[0].steps(); ++t) {
    for (const auto& p : parts) {
      const double* src = p.values_.data() + t * p.n_ * d;
      out.values_.insert(out.values_.end(), src, src + p.n_ * d);
      const char* flags = p.accepted_.data() + t * p.n_;
      out.accepted_.insert(out.accepted_.end(), flags, flags + p.n_);
    }
  }
  for (const auto& p : parts) out.stats_ += p.stats_;
  return out;
}

}  // namespace lae::samplers
