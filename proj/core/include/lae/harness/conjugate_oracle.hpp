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

#include "lae/models/model.hpp"

namespace lae::harness {

struct GaussianMoments {
  Vector mean;
  Matrix covariance;
};

/// Closed-form posterior and evidence for z ~ N(mu_z, Sigma_z),
/// x | z ~ N(z, Sigma_x).
class ConjugateOracle {
 public:
  /// Throws DomainError unless both covariances are SPD.
  ConjugateOracle(Vector prior_mean, Matrix prior_cov, Matrix obs_cov);

  std::size_t dim() const { return static_cast<std::size_t>(prior_mean_.size()); }
  const Vector& prior_mean() const { return prior_mean_; }
  const Matrix& prior_cov() const { return prior_cov_; }
  const Matrix& obs_cov() const { return obs_cov_; }

  /// Sigma_post = (Sigma_z^-1 + Sigma_x^-1)^-1,
  /// mu_post = Sigma_post (Sigma_z^-1 mu_z + Sigma_x^-1 x).
  GaussianMoments posterior(const Vector& x) const;
  const Matrix& posterior_covariance() const { return post_cov_; }
  /// log N(x; mu_z, Sigma_z + Sigma_x).
  double log_marginal(const Vector& x) const;
  /// Maximum-likelihood offset c for x | z ~ N(z + c, Sigma_x): mean(x) - mu_z.
  Vector offset_mle(const Matrix& x) const;

  /// The matching model, optionally with a learnable observation offset.
  models::LatentVariableModel make_model(bool learnable_offset = false) const;

 private:
  Vector prior_mean_;
  Matrix prior_cov_, obs_cov_;
  Matrix prior_prec_, obs_prec_, post_cov_;
};

/// The two-dimensional toy matrices: Sigma_z = I and the symmetric
/// observation covariance [[0.7, 0.6], [0.6, 0.8]].
Matrix toy_observation_covariance();
ConjugateOracle toy_conjugate_oracle();

}  // namespace lae::harness
