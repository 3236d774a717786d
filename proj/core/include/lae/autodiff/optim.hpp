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
#include <string>
#include <vector>

#include "lae/autodiff/tensor.hpp"

namespace lae::ad {

/// First-order optimizer over a fixed parameter list. `step` reads the
/// accumulated gradients and updates the parameter values in place; it does
/// not clear the gradients.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step() = 0;
  void zero_grad() { zero_grads(params_); }
  const std::vector<NamedTensor>& params() const { return params_; }

 protected:
  explicit Optimizer(std::vector<NamedTensor> params) : params_(std::move(params)) {}
  std::vector<NamedTensor> params_;
};

class Sgd final : public Optimizer {
 public:
  Sgd(std::vector<NamedTensor> params, double learning_rate);
  void step() override;

 private:
  double lr_;
};

class Adam final : public Optimizer {
 public:
  Adam(std::vector<NamedTensor> params, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);
  void step() override;

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

std::unique_ptr<Optimizer> make_optimizer(const std::string& kind, std::vector<NamedTensor> params,
                                          double learning_rate);

}  // namespace lae::ad
