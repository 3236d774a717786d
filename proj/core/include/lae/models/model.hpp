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

#include <memory>
#include <vector>

#include "lae/models/likelihood.hpp"
#include "lae/models/prior.hpp"

namespace lae::models {

/// Prior plus likelihood; defines the potential U(x, z) = -log p(x, z).
class LatentVariableModel {
 public:
  LatentVariableModel(GaussianPrior prior, std::unique_ptr<Likelihood> likelihood);

  std::size_t latent_dim() const { return prior_.dim(); }
  std::size_t data_dim() const { return likelihood_->data_dim(); }
  const GaussianPrior& prior() const { return prior_; }
  const Likelihood& likelihood() const { return *likelihood_; }
  Likelihood& likelihood() { return *likelihood_; }

  double log_prior(const Vector& z) const { return prior_.log_density(z); }
  /// Row-wise log p(x_i | z_i), shape [n].
  ad::Tensor log_likelihood(const Matrix& x, const ad::Tensor& z) const;
  /// Row-wise log p(x_i, z_i), shape [n].
  ad::Tensor log_joint(const Matrix& x, const ad::Tensor& z) const;
  /// Row-wise U(x_i, z_i) = -log p(x_i, z_i), shape [n].
  ad::Tensor potential(const Matrix& x, const ad::Tensor& z) const;

  /// Untaped single-point potential.
  double potential(const Vector& x, const Vector& z) const;

  /// Potential of every row of `z` against one observation `x`, evaluated in
  /// chunks without building a tape. Used by grid oracles.
  Vector potential_grid(const Vector& x, const Matrix& z, std::size_t chunk = 4096) const;

  /// theta.
  std::vector<ad::NamedTensor> parameters() const { return likelihood_->parameters(); }

 private:
  GaussianPrior prior_;
  std::unique_ptr<Likelihood> likelihood_;
};

}  // namespace lae::models
