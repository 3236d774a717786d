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

#include "lae/autodiff/optim.hpp"

#include <cmath>

#include "lae/common/error.hpp"

namespace lae::ad {

Sgd::Sgd(std::vector<NamedTensor> params, double learning_rate)
    : Optimizer(std::move(params)), lr_(learning_rate) {}

void Sgd::step() {
  for (auto& p : params_) {
    auto g = p.tensor.grad();
    if (g.empty()) continue;
    auto w = p.tensor.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr_ * g[i];
  }
}

Adam::Adam(std::vector<NamedTensor> params, double learning_rate, double beta1, double beta2,
           double epsilon)
    : Optimizer(std::move(params)), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.size(), 0.0);
    v_.emplace_back(p.tensor.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto g = params_[k].tensor.grad();
    if (g.empty()) continue;
    auto w = params_[k].tensor.mutable_values();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      w[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& kind, std::vector<NamedTensor> params,
                                          double learning_rate) {
  if (kind == "sgd") return std::make_unique<Sgd>(std::move(params), learning_rate);
  if (kind == "adam") return std::make_unique<Adam>(std::move(params), learning_rate);
  throw ConfigError("unknown optimizer '" + kind + "'");
}

}  // namespace lae::ad
