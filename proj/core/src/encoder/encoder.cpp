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

#include <algorithm>

#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"
#include "lae/encoder/encoder.hpp"

namespace lae::encoder {

MlpFeatures::MlpFeatures(ad::Mlp mlp, std::optional<double> row_norm)
    : mlp_(std::move(mlp)), row_norm_(row_norm) {
  if (row_norm_ && !(*row_norm_ > 0.0)) throw ConfigError("feature row norm must be positive");
}

ad::Tensor MlpFeatures::features(const Matrix& x) const {
  if (x.rows() == 0) throw DimensionError("features: empty batch");
  if (static_cast<std::size_t>(x.cols()) != input_dim()) {
    throw DimensionError("features: expected inputs of dimension " + std::to_string(input_dim()) +
                         ", got " + std::to_string(x.cols()));
  }
  ad::Tensor g = mlp_.forward(ad::Tensor::constant(x));
  if (row_norm_) g = ad::normalize_rows(g, *row_norm_);
  return g;
}

OneHotFeatures::OneHotFeatures(std::size_t input_dim, std::size_t feature_dim)
    : input_dim_(input_dim), feature_dim_(feature_dim) {
  if (feature_dim == 0) throw ConfigError("one-hot features need d >= 1");
}

ad::Tensor OneHotFeatures::features(const Matrix& x) const {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw DimensionError("features: empty batch");
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw DimensionError("features: expected inputs of dimension " + std::to_string(input_dim_));
  }
  if (n > feature_dim_) {
    throw DimensionError("one-hot features: batch of " + std::to_string(n) +
                         " exceeds feature dimension " + std::to_string(feature_dim_));
  }
  Matrix g = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(feature_dim_));
  for (Eigen::Index i = 0; i < x.rows(); ++i) g(i, i) = 1.0;
  return ad::Tensor::constant(g);
}

std::unique_ptr<FeatureExtractor> make_features(const FeatureConfig& cfg, std::size_t input_dim,
                                                Rng& rng) {
  if (cfg.kind == "one-hot") return std::make_unique<OneHotFeatures>(input_dim, cfg.feature_dim);
  if (cfg.feature_dim == 0 || cfg.hidden == 0) throw ConfigError("feature widths must be positive");

  ad::MlpSpec spec;
  spec.sizes.push_back(input_dim);
  for (std::size_t i = 0; i < cfg.hidden_layers; ++i) spec.sizes.push_back(cfg.hidden);
  spec.sizes.push_back(cfg.feature_dim);
  spec.layer_norm = cfg.layer_norm;
  if (cfg.kind == "sin") {
    spec.hidden_activation = ad::Activation::kSin;
    spec.output_activation = ad::Activation::kSin;
    spec.first_layer_init = ad::InitSpec{ad::InitSpec::Kind::kNormal, cfg.frequency, 1.0};
    spec.init = ad::InitSpec{ad::InitSpec::Kind::kScaled, cfg.frequency, 1.0};
  } else if (cfg.kind == "relu") {
    spec.hidden_activation = ad::Activation::kRelu;
    spec.output_activation = ad::Activation::kRelu;
    spec.init = ad::InitSpec{ad::InitSpec::Kind::kHe, 1.0, 0.0};
  } else {
    throw ConfigError("unknown feature kind '" + cfg.kind + "'");
  }
  std::optional<double> norm;
  if (cfg.row_norm > 0.0) norm = cfg.row_norm;
  return std::make_unique<MlpFeatures>(ad::Mlp(std::move(spec), rng), norm);
}

AmortizedEncoder::AmortizedEncoder(std::unique_ptr<FeatureExtractor> features,
                                   std::size_t latent_dim)
    : features_(std::move(features)), latent_dim_(latent_dim) {
  if (!features_) throw ConfigError("encoder needs a feature extractor");
  if (latent_dim_ == 0) throw ConfigError("latent dimension must be positive");
  phi_ = ad::Tensor::parameter({latent_dim_, features_->feature_dim()},
                               std::vector<double>(latent_dim_ * features_->feature_dim(), 0.0));
}

ad::Tensor AmortizedEncoder::encode(const Matrix& x) const { return encode_with(features(x), phi_); }

ad::Tensor AmortizedEncoder::encode_with(const ad::Tensor& g) const { return encode_with(g, phi_); }

ad::Tensor AmortizedEncoder::encode_with(const ad::Tensor& g, const ad::Tensor& phi) {
  if (g.rank() != 2 || phi.rank() != 2 || g.cols() != phi.cols()) {
    throw DimensionError("encode: features " + ad::shape_string(g.shape()) +
                         " do not match Phi " + ad::shape_string(phi.shape()));
  }
  return ad::matmul(g, ad::transpose(phi));
}

void AmortizedEncoder::set_phi(const Matrix& phi) {
  if (static_cast<std::size_t>(phi.rows()) != latent_dim_ ||
      static_cast<std::size_t>(phi.cols()) != feature_dim()) {
    throw DimensionError("set_phi: expected [" + std::to_string(latent_dim_) + " x " +
                         std::to_string(feature_dim()) + "]");
  }
  auto dst = phi_.mutable_values();
  std::copy(phi.data(), phi.data() + phi.size(), dst.begin());
}

void AmortizedEncoder::randomize_phi(double std, Rng& rng) {
  auto dst = phi_.mutable_values();
  for (double& v : dst) v = std * rng.normal();
}

std::vector<ad::NamedTensor> AmortizedEncoder::parameters() const {
  auto out = phi_parameters();
  for (auto& p : psi_parameters()) out.push_back(std::move(p));
  return out;
}

}  // namespace lae::encoder
