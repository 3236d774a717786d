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

#include "lae/harness/conjugate_oracle.hpp"

#include <Eigen/Cholesky>

#include "lae/common/error.hpp"

namespace lae::harness {

namespace {

Eigen::MatrixXd spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(m)};
  if (llt.info() != Eigen::Success || !m.isApprox(m.transpose(), 1e-12)) {
    throw DomainError(std::string(what) + " is not symmetric positive definite");
  }
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace

ConjugateOracle::ConjugateOracle(Vector prior_mean, Matrix prior_cov, Matrix obs_cov)
    : prior_mean_(std::move(prior_mean)), prior_cov_(std::move(prior_cov)), obs_cov_(std::move(obs_cov)) {
  const auto d = prior_mean_.size();
  if (prior_cov_.rows() != d || prior_cov_.cols() != d || obs_cov_.rows() != d || obs_cov_.cols() != d) {
    throw DimensionError("conjugate oracle: inconsistent dimensions");
  }
  prior_prec_ = spd_inverse(prior_cov_, "prior covariance");
  obs_prec_ = spd_inverse(obs_cov_, "observation covariance");
  post_cov_ = spd_inverse(prior_prec_ + obs_prec_, "posterior precision");
  post_cov_ = 0.5 * (post_cov_ + post_cov_.transpose()).eval();
}

GaussianMoments ConjugateOracle::posterior(const Vector& x) const {
  if (x.size() != prior_mean_.size()) throw DimensionError("conjugate oracle: observation dimension");
  return {post_cov_ * (prior_prec_ * prior_mean_ + obs_prec_ * x), post_cov_};
}

double ConjugateOracle::log_marginal(const Vector& x) const {
  const models::GaussianPrior marginal(prior_mean_, prior_cov_ + obs_cov_);
  return marginal.log_density(x);
}

Vector ConjugateOracle::offset_mle(const Matrix& x) const {
  if (x.rows() == 0) throw DimensionError("offset MLE of an empty dataset");
  return x.colwise().mean().transpose() - prior_mean_;
}

models::LatentVariableModel ConjugateOracle::make_model(bool learnable_offset) const {
  return models::LatentVariableModel(
      models::GaussianPrior(prior_mean_, prior_cov_),
      std::make_unique<models::GaussianLinearLikelihood>(obs_cov_, learnable_offset));
}

Matrix toy_observation_covariance() {
  Matrix s(2, 2);
  s << 0.7, 0.6, 0.6, 0.8;
  return s;
}

ConjugateOracle toy_conjugate_oracle() {
  return ConjugateOracle(Vector::Zero(2), Matrix::Identity(2, 2), toy_observation_covariance());
}

}  // namespace lae::harness
