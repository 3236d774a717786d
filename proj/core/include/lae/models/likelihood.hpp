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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lae/autodiff/nn.hpp"
#include "lae/models/prior.hpp"

namespace lae::models {

/// Conditional density p(x | z; theta) evaluated in batches: row i of `x`
/// pairs with row i of `z`.
class Likelihood {
 public:
  virtual ~Likelihood() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t latent_dim() const = 0;
  virtual std::size_t data_dim() const = 0;

  /// log p(x_i | z_i; theta), shape [n]; differentiable in z and theta.
  virtual ad::Tensor log_likelihood(const Matrix& x, const ad::Tensor& z) const = 0;

  /// Trainable parameters theta. May be empty.
  virtual std::vector<ad::NamedTensor> parameters() const = 0;

  /// Extra training-loss term for a minibatch of `batch` examples, or an
  /// undefined tensor when the model has none.
  virtual ad::Tensor training_regularizer(std::size_t /*batch*/) const { return {}; }

  /// Draw x ~ p(x | z) for each row of z.
  virtual Matrix sample(const Matrix& z, Rng& rng) const = 0;
};

/// x | z ~ N(z + offset, Sigma_x). The offset is zero and frozen unless
/// constructed learnable.
class GaussianLinearLikelihood final : public Likelihood {
 public:
  explicit GaussianLinearLikelihood(const Matrix& covariance, bool learnable_offset = false);

  std::string kind() const override { return "gaussian-linear"; }
  std::size_t latent_dim() const override { return factor_.dim(); }
  std::size_t data_dim() const override { return factor_.dim(); }
  ad::Tensor log_likelihood(const Matrix& x, const ad::Tensor& z) const override;
  std::vector<ad::NamedTensor> parameters() const override;
  Matrix sample(const Matrix& z, Rng& rng) const override;

  const CovarianceFactor& factor() const { return factor_; }
  Vector offset() const;

 private:
  CovarianceFactor factor_;
  bool learnable_;
  ad::Tensor offset_;
};

/// x | z ~ N(f_theta(z), sigma^2 I) with an MLP decoder.
class NeuralGaussianLikelihood final : public Likelihood {
 public:
  NeuralGaussianLikelihood(ad::Mlp decoder, double sigma);

  std::string kind() const override { return "neural-gaussian"; }
  std::size_t latent_dim() const override { return decoder_.input_dim(); }
  std::size_t data_dim() const override { return decoder_.output_dim(); }
  ad::Tensor log_likelihood(const Matrix& x, const ad::Tensor& z) const override;
  std::vector<ad::NamedTensor> parameters() const override;
  Matrix sample(const Matrix& z, Rng& rng) const override;

  double sigma() const { return sigma_; }
  const ad::Mlp& decoder() const { return decoder_; }

 private:
  ad::Mlp decoder_;
  double sigma_;
};

/// Half-width of one 8-bit pixel bin on the [-1, 1] scale.
inline constexpr double kPixelHalfWidth = 1.0 / 255.0;

/// Maps an 8-bit intensity to 2 v / 255 - 1.
inline double pixel_to_unit(std::uint8_t v) { return 2.0 * static_cast<double>(v) / 255.0 - 1.0; }

/// True if x is (within 1e-6) one of the 256 grid values in [-1, 1].
bool on_pixel_grid(double x);

/// log P(x) for a single pixel under a logistic(mu, 1 / inv_scale) density
/// integrated over the pixel's bin; the outermost bins extend to +-infinity.
double discretized_logistic_log_prob(double x, double mu, double inv_scale);

/// 1/s = softplus(b)^(1/2), i.e. s = softplus(b)^(-1/2).
double inverse_scale_from_pre(double b);

/// (b + 2 softplus(-b)) / m.
double scale_regularizer(double b, std::size_t m);
ad::Tensor scale_regularizer(const ad::Tensor& b, std::size_t m);

/// Row-wise sum of pixel log-probabilities, shape [n]. Throws DomainError
/// for pixels outside [-1, 1]. `b` is a scalar tensor.
ad::Tensor discretized_logistic_log_likelihood(const Matrix& x, const ad::Tensor& mu,
                                               const ad::Tensor& b);

class DiscretizedLogisticLikelihood final : public Likelihood {
 public:
  /// `training_size` is m in the scale regularizer.
  DiscretizedLogisticLikelihood(ad::Mlp decoder, double initial_b, std::size_t training_size);

  std::string kind() const override { return "discretized-logistic"; }
  std::size_t latent_dim() const override { return decoder_.input_dim(); }
  std::size_t data_dim() const override { return decoder_.output_dim(); }
  ad::Tensor log_likelihood(const Matrix& x, const ad::Tensor& z) const override;
  std::vector<ad::NamedTensor> parameters() const override;
  ad::Tensor training_regularizer(std::size_t batch) const override;
  Matrix sample(const Matrix& z, Rng& rng) const override;

  double scale_pre() const { return b_.item(); }
  std::size_t training_size() const { return training_size_; }

 private:
  ad::Mlp decoder_;
  ad::Tensor b_;
  std::size_t training_size_;
};

}  // namespace lae::models
