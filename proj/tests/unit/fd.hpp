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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "lae/autodiff/tensor.hpp"

namespace lae::testing {

/// Central differences of `f` with respect to every entry of `leaf`.
inline std::vector<double> numeric_grad(ad::Tensor& leaf, const std::function<double()>& f, double h = 1e-6) {
  auto v = leaf.mutable_values();
  std::vector<double> g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double orig = v[i];
    v[i] = orig + h;
    const double up = f();
    v[i] = orig - h;
    const double down = f();
    v[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double rel_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
}

/// Relative error between the tape gradient of `loss` and central differences,
/// over all `leaves`.
inline double gradient_error(std::vector<ad::Tensor> leaves, const std::function<ad::Tensor()>& loss,
                             double h = 1e-6) {
  for (auto& l : leaves) l.zero_grad();
  loss().backward();
  std::vector<double> analytic, numeric;
  for (auto& l : leaves) {
    auto g = l.grad();
    analytic.insert(analytic.end(), g.begin(), g.end());
    auto n = numeric_grad(l, [&] { return loss().item(); }, h);
    numeric.insert(numeric.end(), n.begin(), n.end());
  }
  return rel_error(analytic, numeric);
}

}  // namespace lae::testing
