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

#include "lae/models/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "lae/autodiff/numerics.hpp"
#include "lae/common/error.hpp"

namespace lae::models {

namespace {

void require_batch(const char* what, const Matrix& x, const ad::Tensor& z, std::size_t dx,
                   std::size_t dz) {
  if (z.rank() != 2 || z.cols() != dz) {
    throw DimensionError(std::string(what) + ": latent batch must be [n x " + std::to_string(dz) +
                         "], got " + ad::shape_string(z.shape()));
  }
  if (static_cast<std::size_t>(x.cols()) != dx || static_cast<std::size_t>(x.rows()) != z.rows()) {
    throw DimensionError(std::string(what) + ": observation batch is " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()) + ", expected " + std::to_string(z.rows()) +
                         "x" + std::to_string(dx));
  }
}

enum class Bin { kBottom, kInterior, kTop };

Bin classify_pixel(double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("pixel value " + std::to_string(x) + " is outside [-1, 1]");
  if (x < -1.0 + kPixelHalfWidth) return Bin::kBottom;
  if (x > 1.0 - kPixelHalfWidth) return Bin::kTop;
  return Bin::kInterior;
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianLinearLikelihood

GaussianLinearLikelihood::GaussianLinearLikelihood(const Matrix& covariance, bool learnable_offset)
    : factor_(covariance), learnable_(learnable_offset) {
  const std::size_t d = factor_.dim();
  offset_ = learnable_ ? ad::Tensor::parameter({d}, std::vector<double>(d, 0.0))
                       : ad::Tensor::constant({d}, std::vector<double>(d, 0.0));
}

ad::Tensor GaussianLinearLikelihood::log_likelihood(const Matrix& x, const ad::Tensor& z) const {
  require_batch("gaussian-linear likelihood", x, z, data_dim(), latent_dim());
  ad::Tensor mean = learnable_ ? ad::add_row(z, offset_) : z;
  return gaussian_log_density_rows(ad::sub(ad::Tensor::constant(x), mean), factor_);
}

std::vector<ad::NamedTensor> GaussianLinearLikelihood::parameters() const {
  if (!learnable_) return {};
  return {{"likelihood.offset", offset_}};
}

Vector GaussianLinearLikelihood::offset() const {
  auto v = offset_.values();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix GaussianLinearLikelihood::sample(const Matrix& z, Rng& rng) const {
  Matrix x(z.rows(), z.cols());
  const Vector c = offset();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Vector e(z.cols());
    for (Eigen::Index j = 0; j < e.size(); ++j) e[j] = rng.normal();
    x.row(i) = (z.row(i).transpose() + c + factor_.correlate(e)).transpose();
  }
  return x;
}

// ---------------------------------------------------------------------------
// NeuralGaussianLikelihood

NeuralGaussianLikelihood::NeuralGaussianLikelihood(ad::Mlp decoder, double sigma)
    : decoder_(std::move(decoder)), sigma_(sigma) {
  if (!(sigma > 0.0)) throw ConfigError("observation std must be positive");
}

ad::Tensor NeuralGaussianLikelihood::log_likelihood(const Matrix& x, const ad::Tensor& z) const {
  require_batch("neural-gaussian likelihood", x, z, data_dim(), latent_dim());
  ad::Tensor diff = ad::sub(ad::Tensor::constant(x), decoder_.forward(z));
  const double d = static_cast<double>(data_dim());
  const double constant = -0.5 * d * (numerics::kLog2Pi + 2.0 * std::log(sigma_));
  return ad::add_scalar(ad::scale(ad::sum_rows(ad::square(diff)), -0.5 / (sigma_ * sigma_)), constant);
}

std::vector<ad::NamedTensor> NeuralGaussianLikelihood::parameters() const {
  return decoder_.parameters("decoder");
}

Matrix NeuralGaussianLikelihood::sample(const Matrix& z, Rng& rng) const {
  Matrix x = decoder_.forward(ad::Tensor::constant(z)).to_matrix();
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += sigma_ * rng.normal();
  return x;
}

// ---------------------------------------------------------------------------
// Discretized logistic

bool on_pixel_grid(double x) {
  if (!(x >= -1.0 - 1e-9 && x <= 1.0 + 1e-9)) return false;
  const double k = (x + 1.0) * 127.5;
  return std::abs(k - std::round(k)) < 1e-6 * 127.5;
}

double inverse_scale_from_pre(double b) { return std::sqrt(numerics::softplus(b)); }

double discretized_logistic_log_prob(double x, double mu, double inv_scale) {
  const double c = x - mu;
  const double plus = (c + kPixelHalfWidth) * inv_scale;
  const double minus = (c - kPixelHalfWidth) * inv_scale;
  switch (classify_pixel(x)) {
    case Bin::kBottom: return numerics::log_sigmoid(plus);
    case Bin::kTop: return numerics::log_sigmoid(-minus);
    case Bin::kInterior: break;
  }
  // sigma(p) - sigma(m) = sigma(p) sigma(-m) (1 - e^{-(p - m)}).
  return numerics::log_sigmoid(plus) + numerics::log_sigmoid(-minus) +
         std::log(-std::expm1(-(plus - minus)));
}

double scale_regularizer(double b, std::size_t m) {
  if (m == 0) throw ConfigError("scale regularizer needs m >= 1");
  return (b + 2.0 * numerics::softplus(-b)) / static_cast<double>(m);
}

ad::Tensor scale_regularizer(const ad::Tensor& b, std::size_t m) {
  if (m == 0) throw ConfigError("scale regularizer needs m >= 1");
  ad::Tensor two_sp = ad::scale(ad::softplus(ad::scale(b, -1.0)), 2.0);
  return ad::scale(ad::add(b, two_sp), 1.0 / static_cast<double>(m));
}

ad::Tensor discretized_logistic_log_likelihood(const Matrix& x, const ad::Tensor& mu,
                                               const ad::Tensor& b) {
  if (mu.rank() != 2 || static_cast<std::size_t>(x.rows()) != mu.rows() ||
      static_cast<std::size_t>(x.cols()) != mu.cols()) {
    throw DimensionError("discretized logistic: observations and means differ in shape");
  }
  if (b.size() != 1) throw DimensionError("discretized logistic: scale pre-parameter must be scalar");
  const std::size_t n = mu.rows(), d = mu.cols();
  const double pre = b.item();
  const double inv_s = inverse_scale_from_pre(pre);
  auto muv = mu.values();

  // Per-pixel partials d/dmu and d/d(inv_s), saved for the backward pass.
  auto d_mu = std::make_shared<std::vector<double>>(n * d);
  auto d_inv = std::make_shared<std::vector<double>>(n * d);
  std::vector<double> out(n, 0.0);
  const double h = kPixelHalfWidth;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t k = i * d + j;
      const double xv = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double c = xv - muv[k];
      const double plus = (c + h) * inv_s;
      const double minus = (c - h) * inv_s;
      switch (classify_pixel(xv)) {
        case Bin::kBottom: {
          acc += numerics::log_sigmoid(plus);
          const double s = numerics::sigmoid(-plus);
          (*d_mu)[k] = -inv_s * s;
          (*d_inv)[k] = s * (c + h);
          break;
        }
        case Bin::kTop: {
          acc += numerics::log_sigmoid(-minus);
          const double s = numerics::sigmoid(minus);
          (*d_mu)[k] = inv_s * s;
          (*d_inv)[k] = -s * (c - h);
          break;
        }
        case Bin::kInterior: {
          const double delta = plus - minus;
          acc += numerics::log_sigmoid(plus) + numerics::log_sigmoid(-minus) +
                 std::log(-std::expm1(-delta));
          const double sp = numerics::sigmoid(-plus);
          const double sm = numerics::sigmoid(minus);
          (*d_mu)[k] = -inv_s * (sp - sm);
          (*d_inv)[k] = sp * (c + h) - sm * (c - h) + 2.0 * h / std::expm1(delta);
          break;
        }
      }
    }
    out[i] = acc;
  }
  const double dinv_db = numerics::sigmoid(pre) / (2.0 * inv_s);
  return ad::make_op(ad::OpKind::kCustom, {n}, std::move(out), {mu, b},
                     [n, d, d_mu, d_inv, dinv_db](const ad::BackwardContext& ctx) {
                       auto gmu = ctx.grad_in[0], gb = ctx.grad_in[1];
                       double acc_b = 0.0;
                       for (std::size_t i = 0; i < n; ++i) {
                         const double dy = ctx.grad_out[i];
                         for (std::size_t j = 0; j < d; ++j) {
                           const std::size_t k = i * d + j;
                           if (!gmu.empty()) gmu[k] += dy * (*d_mu)[k];
                           acc_b += dy * (*d_inv)[k];
                         }
                       }
                       if (!gb.empty()) gb[0] += acc_b * dinv_db;
                     });
}

DiscretizedLogisticLikelihood::DiscretizedLogisticLikelihood(ad::Mlp decoder, double initial_b,
                                                             std::size_t training_size)
    : decoder_(std::move(decoder)), b_(ad::Tensor::parameter({}, {initial_b})),
      training_size_(training_size) {
  if (training_size == 0) throw ConfigError("training set size must be positive");
}

ad::Tensor DiscretizedLogisticLikelihood::log_likelihood(const Matrix& x, const ad::Tensor& z) const {
  require_batch("discretized-logistic likelihood", x, z, data_dim(), latent_dim());
  return discretized_logistic_log_likelihood(x, decoder_.forward(z), b_);
}

std::vector<ad::NamedTensor> DiscretizedLogisticLikelihood::parameters() const {
  auto params = decoder_.parameters("decoder");
  params.push_back({"likelihood.scale_pre", b_});
  return params;
}

ad::Tensor DiscretizedLogisticLikelihood::training_regularizer(std::size_t batch) const {
  return ad::scale(scale_regularizer(b_, training_size_), static_cast<double>(batch));
}

Matrix DiscretizedLogisticLikelihood::sample(const Matrix& z, Rng& rng) const {
  Matrix mu = decoder_.forward(ad::Tensor::constant(z)).to_matrix();
  const double s = 1.0 / inverse_scale_from_pre(b_.item());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    double u = rng.uniform();
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    const double v = mu.data()[i] + s * std::log(u / (1.0 - u));
    const double k = std::clamp(std::round((v + 1.0) * 127.5), 0.0, 255.0);
    mu.data()[i] = pixel_to_unit(static_cast<std::uint8_t>(k));
  }
  return mu;
}

}  // namespace lae::models
