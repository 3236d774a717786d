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

#include <optional>
#include <string>
#include <vector>

#include "lae/autodiff/ops.hpp"
#include "lae/common/rng.hpp"

namespace lae::ad {

enum class Activation { kNone, kRelu, kTanh, kSin };

Activation parse_activation(const std::string& name);
const char* activation_name(Activation a);
Tensor activate(Activation a, const Tensor& x);

/// How initial weights are drawn.
struct InitSpec {
  enum class Kind {
    kHe,      ///< N(0, 2 / fan_in) weights, zero biases.
    kNormal,  ///< N(0, weight_std^2) weights, N(0, bias_std^2) biases.
    kScaled,  ///< N(0, (weight_std^2) / fan_in) weights, N(0, bias_std^2) biases.
  };
  Kind kind = Kind::kHe;
  double weight_std = 1.0;
  double bias_std = 0.0;
};

struct MlpSpec {
  /// Layer widths including input and output, e.g. {2, 128, 128, 2}.
  std::vector<std::size_t> sizes;
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kNone;
  /// Layer normalization between each hidden linear map and its activation.
  bool layer_norm = false;
  bool output_bias = true;
  InitSpec init;
  /// Separate init for the first layer; falls back to `init` when unset.
  std::optional<InitSpec> first_layer_init;
};

class Linear {
 public:
  Linear(std::size_t in, std::size_t out, bool bias, const InitSpec& init, Rng& rng);

  Tensor forward(const Tensor& x) const;
  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;

 private:
  std::size_t in_, out_;
  Tensor weight_;  // [in x out]
  Tensor bias_;    // [out], undefined when the layer has no bias
};

/// Fully connected network. Hidden layers compute act(LN?(x W + b)).
class Mlp {
 public:
  Mlp(MlpSpec spec, Rng& rng);

  Tensor forward(const Tensor& x) const;
  const MlpSpec& spec() const { return spec_; }
  std::size_t input_dim() const { return spec_.sizes.front(); }
  std::size_t output_dim() const { return spec_.sizes.back(); }
  std::vector<NamedTensor> parameters(const std::string& prefix) const;

 private:
  MlpSpec spec_;
  std::vector<Linear> layers_;
  std::vector<Tensor> ln_gain_, ln_bias_;
};

}  // namespace lae::ad
