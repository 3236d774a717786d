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

#include <vector>

#include "lae/autodiff/nn.hpp"

namespace lae::trainers {

/// q(z | x; phi) = N(mu(x), diag(exp(logvar(x)))) with a shared trunk and two
/// linear heads.
class GaussianVariationalEncoder {
 public:
  struct Output {
    ad::Tensor mean;    // [n x d_z]
    ad::Tensor logvar;  // [n x d_z]
  };

  GaussianVariationalEncoder(ad::MlpSpec trunk, std::size_t latent_dim, Rng& rng);

  std::size_t input_dim() const { return trunk_.input_dim(); }
  std::size_t latent_dim() const { return latent_dim_; }

  Output forward(const Matrix& x) const;
  /// z = mean + exp(logvar / 2) * eps.
  static ad::Tensor reparameterize(const Output& q, const Matrix& eps);
  /// Row-wise log q(z_i | x_i), shape [n].
  static ad::Tensor log_density(const Output& q, const ad::Tensor& z);

  std::vector<ad::NamedTensor> parameters() const;

 private:
  ad::Mlp trunk_;
  ad::Linear mean_head_, logvar_head_;
  std::size_t latent_dim_;
};

/// Closed-form KL(N(mu, diag(exp(logvar))) || N(0, I)) per row.
Vector gaussian_kl_standard(const Matrix& mean, const Matrix& logvar);

}  // namespace lae::trainers
