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

#include "lae/models/prior.hpp"

#include <cmath>

#include "lae/autodiff/numerics.hpp"
#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"

namespace lae::models {

CovarianceFactor::CovarianceFactor(const Matrix& covariance) : covariance_(covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    throw DimensionError("covariance must be a non-empty square matrix");
  }
  if (!covariance.isApprox(covariance.transpose(), 1e-12)) {
    throw DomainError("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(covariance)};
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  lower_ = llt.matrixL();
  log_det_ = 2.0 * lower_.diagonal().array().log().sum();
}

Vector CovarianceFactor::solve(const Vector& r) const {
  Vector y = lower_.triangularView<Eigen::Lower>().solve(r);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

double CovarianceFactor::mahalanobis(const Vector& r) const {
  Vector y = lower_.triangularView<Eigen::Lower>().solve(r);
  return y.squaredNorm();
}

Vector CovarianceFactor::correlate(const Vector& e) const { return lower_ * e; }

ad::Tensor gaussian_log_density_rows(const ad::Tensor& diff, const CovarianceFactor& factor) {
  const std::size_t d = factor.dim();
  if (diff.rank() != 2 || diff.cols() != d) {
    throw DimensionError("gaussian density: expected [n x " + std::to_string(d) + "], got " +
                         ad::shape_string(diff.shape()));
  }
  const std::size_t n = diff.rows();
  const double constant = -0.5 * (static_cast<double>(d) * numerics::kLog2Pi + factor.log_det());
  auto values = diff.values();
  // Row i of `precision_diff` holds Sigma^{-1} r_i, reused by the backward pass.
  auto precision_diff = std::make_shared<Matrix>(n, d);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector r = Eigen::Map<const Vector>(values.data() + i * d, static_cast<Eigen::Index>(d));
    Vector s = factor.solve(r);
    precision_diff->row(static_cast<Eigen::Index>(i)) = s.transpose();
    out[i] = constant - 0.5 * factor.mahalanobis(r);
  }
  return ad::make_op(ad::OpKind::kCustom, {n}, std::move(out), {diff},
                     [n, d, precision_diff](const ad::BackwardContext& ctx) {
                       auto g = ctx.grad_in[0];
                       for (std::size_t i = 0; i < n; ++i) {
                         for (std::size_t j = 0; j < d; ++j) {
                           g[i * d + j] -= ctx.grad_out[i] * (*precision_diff)(i, j);
                         }
                       }
                     });
}

GaussianPrior::GaussianPrior(Vector mean, const Matrix& covariance)
    : mean_(std::move(mean)), factor_(covariance) {
  if (static_cast<std::size_t>(mean_.size()) != factor_.dim()) {
    throw DimensionError("prior mean and covariance dimensions differ");
  }
}

GaussianPrior GaussianPrior::standard(std::size_t dim) {
  return GaussianPrior(Vector::Zero(static_cast<Eigen::Index>(dim)),
                       Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

double GaussianPrior::log_density(const Vector& z) const {
  if (z.size() != mean_.size()) {
    throw DimensionError("log_prior: expected " + std::to_string(mean_.size()) + " latent dims, got " +
                         std::to_string(z.size()));
  }
  return -0.5 * (static_cast<double>(dim()) * numerics::kLog2Pi + factor_.log_det() +
                 factor_.mahalanobis(z - mean_));
}

ad::Tensor GaussianPrior::log_density(const ad::Tensor& z) const {
  if (z.rank() != 2 || z.cols() != dim()) {
    throw DimensionError("log_prior: expected [n x " + std::to_string(dim()) + "], got " +
                         ad::shape_string(z.shape()));
  }
  Matrix means = mean_.transpose().replicate(static_cast<Eigen::Index>(z.rows()), 1);
  return gaussian_log_density_rows(ad::sub(z, ad::Tensor::constant(means)), factor_);
}

Vector GaussianPrior::sample(Rng& rng) const {
  Vector e(mean_.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
  return mean_ + factor_.correlate(e);
}

}  // namespace lae::models
