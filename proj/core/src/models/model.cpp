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

#include "lae/models/model.hpp"

#include <algorithm>

#include "lae/common/error.hpp"

namespace lae::models {

LatentVariableModel::LatentVariableModel(GaussianPrior prior, std::unique_ptr<Likelihood> likelihood)
    : prior_(std::move(prior)), likelihood_(std::move(likelihood)) {
  if (!likelihood_) throw ConfigError("model needs a likelihood");
  if (likelihood_->latent_dim() != prior_.dim()) {
    throw DimensionError("prior dimension " + std::to_string(prior_.dim()) +
                         " differs from likelihood latent dimension " +
                         std::to_string(likelihood_->latent_dim()));
  }
}

ad::Tensor LatentVariableModel::log_likelihood(const Matrix& x, const ad::Tensor& z) const {
  return likelihood_->log_likelihood(x, z);
}

ad::Tensor LatentVariableModel::log_joint(const Matrix& x, const ad::Tensor& z) const {
  return ad::add(prior_.log_density(z), likelihood_->log_likelihood(x, z));
}

ad::Tensor LatentVariableModel::potential(const Matrix& x, const ad::Tensor& z) const {
  return ad::scale(log_joint(x, z), -1.0);
}

double LatentVariableModel::potential(const Vector& x, const Vector& z) const {
  Matrix xm = x.transpose();
  Matrix zm = z.transpose();
  return potential(xm, ad::Tensor::constant(zm)).item();
}

Vector LatentVariableModel::potential_grid(const Vector& x, const Matrix& z, std::size_t chunk) const {
  const Eigen::Index n = z.rows();
  Vector out(n);
  for (Eigen::Index start = 0; start < n; start += static_cast<Eigen::Index>(chunk)) {
    const Eigen::Index len = std::min<Eigen::Index>(static_cast<Eigen::Index>(chunk), n - start);
    Matrix xs = x.transpose().replicate(len, 1);
    Matrix zs = z.middleRows(start, len);
    ad::Tensor u = potential(xs, ad::Tensor::constant(zs));
    auto v = u.values();
    std::copy(v.begin(), v.end(), out.data() + start);
  }
  return out;
}

}  // namespace lae::models
