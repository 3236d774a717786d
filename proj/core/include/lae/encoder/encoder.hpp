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
#include <optional>
#include <string>
#include <vector>

#include "lae/autodiff/nn.hpp"

namespace lae::encoder {

/// The feature map g(x; psi) from R^{d_x} to R^d.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string kind() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t feature_dim() const = 0;
  /// G with g(x_i) in row i, shape [n x d]; tape-connected to psi.
  virtual ad::Tensor features(const Matrix& x) const = 0;
  virtual std::vector<ad::NamedTensor> parameters() const = 0;
};

/// MLP feature map, optionally followed by rescaling every row of G to a
/// fixed Euclidean norm.
class MlpFeatures final : public FeatureExtractor {
 public:
  MlpFeatures(ad::Mlp mlp, std::optional<double> row_norm = std::nullopt);
  std::string kind() const override { return "mlp"; }
  std::size_t input_dim() const override { return mlp_.input_dim(); }
  std::size_t feature_dim() const override { return mlp_.output_dim(); }
  ad::Tensor features(const Matrix& x) const override;
  std::vector<ad::NamedTensor> parameters() const override { return mlp_.parameters("features"); }
  std::optional<double> row_norm() const { return row_norm_; }

 private:
  ad::Mlp mlp_;
  std::optional<double> row_norm_;
};

/// g(x_i) = e_i: row i of the batch maps to the i-th standard basis vector
/// of R^d, whatever its content. Has no parameters.
class OneHotFeatures final : public FeatureExtractor {
 public:
  OneHotFeatures(std::size_t input_dim, std::size_t feature_dim);
  std::string kind() const override { return "one-hot"; }
  std::size_t input_dim() const override { return input_dim_; }
  std::size_t feature_dim() const override { return feature_dim_; }
  /// Throws DimensionError if the batch has more rows than d.
  ad::Tensor features(const Matrix& x) const override;
  std::vector<ad::NamedTensor> parameters() const override { return {}; }

 private:
  std::size_t input_dim_, feature_dim_;
};

struct FeatureConfig {
  std::string kind = "sin";  ///< "sin", "relu" or "one-hot"
  std::size_t hidden = 128;
  std::size_t hidden_layers = 2;
  std::size_t feature_dim = 128;
  /// Row norm applied to G; 0 disables the rescaling.
  double row_norm = 16.0;
  /// Weight scale of the sinusoidal variant.
  double frequency = 4.0;
  bool layer_norm = false;
};

/// Build a feature extractor for inputs of dimension `input_dim`.
std::unique_ptr<FeatureExtractor> make_features(const FeatureConfig& cfg, std::size_t input_dim,
                                                Rng& rng);

/// f(x) = Phi g(x; psi), with Phi of shape [d_z x d] and no bias.
class AmortizedEncoder {
 public:
  AmortizedEncoder(std::unique_ptr<FeatureExtractor> features, std::size_t latent_dim);

  std::size_t input_dim() const { return features_->input_dim(); }
  std::size_t feature_dim() const { return features_->feature_dim(); }
  std::size_t latent_dim() const { return latent_dim_; }
  const FeatureExtractor& extractor() const { return *features_; }

  ad::Tensor features(const Matrix& x) const { return features_->features(x); }
  /// Z = G Phi^T, shape [n x d_z].
  ad::Tensor encode(const Matrix& x) const;
  /// Same product against a precomputed feature matrix.
  ad::Tensor encode_with(const ad::Tensor& g) const;
  /// Z = G Phi^T for an arbitrary Phi tensor (used by samplers on proposals).
  static ad::Tensor encode_with(const ad::Tensor& g, const ad::Tensor& phi);

  const ad::Tensor& phi() const { return phi_; }
  Matrix phi_matrix() const { return phi_.to_matrix(); }
  void set_phi(const Matrix& phi);
  /// Draw every entry of Phi from N(0, std^2).
  void randomize_phi(double std, Rng& rng);

  std::vector<ad::NamedTensor> phi_parameters() const { return {{"encoder.phi", phi_}}; }
  std::vector<ad::NamedTensor> psi_parameters() const { return features_->parameters(); }
  std::vector<ad::NamedTensor> parameters() const;

 private:
  std::unique_ptr<FeatureExtractor> features_;
  std::size_t latent_dim_;
  ad::Tensor phi_;
};

struct RankDiagnostic {
  std::size_t rank = 0;
  bool satisfied = false;
};

inline constexpr double kRankTolerance = 1e-10;

/// Numerical rank of G from singular values above tol * sigma_max.
/// `satisfied` is true when the rank equals the number of rows.
RankDiagnostic rank_diagnostic(const Matrix& g, double tol = kRankTolerance);

}  // namespace lae::encoder
