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

#include <Eigen/Cholesky>

#include "lae/autodiff/tensor.hpp"
#include "lae/common/rng.hpp"
#include "lae/common/types.hpp"

namespace lae::models {

/// Cholesky factor of an SPD covariance. All density work goes through
/// triangular solves against `lower`; no explicit inverse is formed.
class CovarianceFactor {
 public:
  /// Throws DimensionError for non-square input, DomainError if not SPD.
  explicit CovarianceFactor(const Matrix& covariance);

  std::size_t dim() const { return static_cast<std::size_t>(covariance_.rows()); }
  const Matrix& covariance() const { return covariance_; }
  const Eigen::MatrixXd& lower() const { return lower_; }
  double log_det() const { return log_det_; }

  /// Sigma^{-1} r.
  Vector solve(const Vector& r) const;
  /// r^T Sigma^{-1} r.
  double mahalanobis(const Vector& r) const;
  /// L * e, maps a standard normal draw to N(0, Sigma).
  Vector correlate(const Vector& e) const;

 private:
  Matrix covariance_;
  Eigen::MatrixXd lower_;
  double log_det_ = 0.0;
};

/// Row-wise log N(diff_i; 0, Sigma), shape [n]; differentiable in `diff`.
ad::Tensor gaussian_log_density_rows(const ad::Tensor& diff, const CovarianceFactor& factor);

class GaussianPrior {
 public:
  GaussianPrior(Vector mean, const Matrix& covariance);
  static GaussianPrior standard(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const CovarianceFactor& factor() const { return factor_; }

  /// Exact log-density of a single latent vector.
  double log_density(const Vector& z) const;
  /// Row-wise log-density of z[n x d_z]; tape-connected, shape [n].
  ad::Tensor log_density(const ad::Tensor& z) const;
  Vector sample(Rng& rng) const;

 private:
  Vector mean_;
  CovarianceFactor factor_;
};

}  // namespace lae::models
