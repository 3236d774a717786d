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

#include "lae/autodiff/nn.hpp"

#include <cmath>

#include "lae/common/error.hpp"

namespace lae::ad {

Activation parse_activation(const std::string& name) {
  if (name == "none" || name == "linear") return Activation::kNone;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sin") return Activation::kSin;
  throw ConfigError("unknown activation '" + name + "'");
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kNone: return "none";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSin: return "sin";
  }
  return "unknown";
}

Tensor activate(Activation a, const Tensor& x) {
  switch (a) {
    case Activation::kNone: return x;
    case Activation::kRelu: return relu(x);
    case Activation::kTanh: return tanh(x);
    case Activation::kSin: return sin(x);
  }
  return x;
}

Linear::Linear(std::size_t in, std::size_t out, bool bias, const InitSpec& init, Rng& rng)
    : in_(in), out_(out) {
  double w_std = init.weight_std;
  double b_std = init.bias_std;
  switch (init.kind) {
    case InitSpec::Kind::kHe:
      w_std = std::sqrt(2.0 / static_cast<double>(in));
      b_std = 0.0;
      break;
    case InitSpec::Kind::kNormal: break;
    case InitSpec::Kind::kScaled: w_std = init.weight_std / std::sqrt(static_cast<double>(in)); break;
  }
  std::vector<double> w(in * out);
  for (double& v : w) v = w_std * rng.normal();
  weight_ = Tensor::parameter({in, out}, std::move(w));
  if (bias) {
    std::vector<double> b(out);
    for (double& v : b) v = b_std * rng.normal();
    bias_ = Tensor::parameter({out}, std::move(b));
  }
}

Tensor Linear::forward(const Tensor& x) const {
  Tensor y = matmul(x, weight_);
  return bias_.defined() ? add_row(y, bias_) : y;
}

void Linear::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".weight", weight_});
  if (bias_.defined()) out.push_back({prefix + ".bias", bias_});
}

Mlp::Mlp(MlpSpec spec, Rng& rng) : spec_(std::move(spec)) {
  if (spec_.sizes.size() < 2) throw ConfigError("an MLP needs at least input and output sizes");
  const std::size_t n_layers = spec_.sizes.size() - 1;
  for (std::size_t i = 0; i < n_layers; ++i) {
    const bool last = i + 1 == n_layers;
    const InitSpec& init = (i == 0 && spec_.first_layer_init) ? *spec_.first_layer_init : spec_.init;
    layers_.emplace_back(spec_.sizes[i], spec_.sizes[i + 1], !last || spec_.output_bias, init, rng);
    if (!last && spec_.layer_norm) {
      const std::size_t h = spec_.sizes[i + 1];
      ln_gain_.push_back(Tensor::parameter({h}, std::vector<double>(h, 1.0)));
      ln_bias_.push_back(Tensor::parameter({h}, std::vector<double>(h, 0.0)));
    }
  }
}

Tensor Mlp::forward(const Tensor& x) const {
  if (x.rank() != 2 || x.cols() != input_dim()) {
    throw DimensionError("mlp: expected [n x " + std::to_string(input_dim()) + "] input, got " +
                         shape_string(x.shape()));
  }
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) {
      if (spec_.layer_norm) h = layer_norm(h, ln_gain_[i], ln_bias_[i]);
      h = activate(spec_.hidden_activation, h);
    } else {
      h = activate(spec_.output_activation, h);
    }
  }
  return h;
}

std::vector<NamedTensor> Mlp::parameters(const std::string& prefix) const {
  std::vector<NamedTensor> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].collect(prefix + ".layer" + std::to_string(i), out);
    if (spec_.layer_norm && i < ln_gain_.size()) {
      out.push_back({prefix + ".ln" + std::to_string(i) + ".gain", ln_gain_[i]});
      out.push_back({prefix + ".ln" + std::to_string(i) + ".bias", ln_bias_[i]});
    }
  }
  return out;
}

}  // namespace lae::ad
