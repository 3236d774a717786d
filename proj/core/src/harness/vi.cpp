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

#include "lae/harness/vi.hpp"

#include <cmath>

#include "lae/autodiff/ops.hpp"
#include "lae/autodiff/optim.hpp"
#include "lae/common/error.hpp"

namespace lae::harness {

GaussianMoments fit_gaussian_vi(const models::LatentVariableModel& model, const Vector& x, const ViConfig& cfg) {
  if (cfg.samples == 0 || cfg.iterations == 0) throw ConfigError("VI needs samples and iterations");
  const std::size_t d = model.latent_dim();
  const auto s = static_cast<Eigen::Index>(cfg.samples);
  ad::FreezeGuard freeze(model.parameters());
  Rng rng(cfg.seed);

  ad::Tensor mean = ad::Tensor::zeros({d}, true);
  // Diagonal: log standard deviations. Full: a square matrix whose strict
  // lower triangle and log-diagonal define the Cholesky factor.
  ad::Tensor scale = cfg.family == ViFamily::kDiagonal ? ad::Tensor::zeros({d}, true)
                                                       : ad::Tensor::zeros({d, d}, true);
  Matrix diag_mask = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Matrix lower_mask = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < lower_mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) lower_mask(i, j) = 1.0;
  }
  const ad::Tensor diag_t = ad::Tensor::constant(diag_mask), lower_t = ad::Tensor::constant(lower_mask);
  auto factor = [&]() {
    return ad::add(ad::mul(scale, lower_t), ad::mul(ad::exp(scale), diag_t));
  };

  ad::Adam opt({{"vi.mean", mean}, {"vi.scale", scale}}, cfg.learning_rate);
  const Matrix xs = x.transpose().replicate(s, 1);
  Matrix eps(s, static_cast<Eigen::Index>(d));
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    rng.fill_normal(std::span<double>(eps.data(), static_cast<std::size_t>(eps.size())));
    const ad::Tensor e = ad::Tensor::constant(eps);
    ad::Tensor z, entropy;
    if (cfg.family == ViFamily::kDiagonal) {
      z = ad::add_row(ad::mul_row(e, ad::exp(scale)), mean);
      entropy = ad::sum(scale);
    } else {
      z = ad::add_row(ad::matmul(e, ad::transpose(factor())), mean);
      entropy = ad::sum(ad::mul(scale, diag_t));
    }
    // Negative ELBO up to a constant: E_q[U] - H[q].
    ad::Tensor loss = ad::sub(ad::scale(ad::sum(model.potential(xs, z)), 1.0 / static_cast<double>(s)), entropy);
    opt.zero_grad();
    loss.backward();
    opt.step();
  }

  GaussianMoments fit;
  fit.mean = Eigen::Map<const Vector>(mean.values().data(), static_cast<Eigen::Index>(d));
  Matrix l;
  if (cfg.family == ViFamily::kDiagonal) {
    l = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) l(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = std::exp(scale(k));
  } else {
    l = factor().to_matrix();
  }
  fit.covariance = l * l.transpose();
  return fit;
}

Matrix sample_gaussian(const GaussianMoments& g, std::size_t count, Rng& rng) {
  const models::CovarianceFactor f(g.covariance);
  Matrix out(static_cast<Eigen::Index>(count), g.mean.size());
  Vector e(g.mean.size());
  for (std::size_t t = 0; t < count; ++t) {
    for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = rng.normal();
    out.row(static_cast<Eigen::Index>(t)) = (g.mean + f.correlate(e)).transpose();
  }
  return out;
}

}  // namespace lae::harness
