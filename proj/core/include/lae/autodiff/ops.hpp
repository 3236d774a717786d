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

#include "lae/autodiff/tensor.hpp"

namespace lae::ad {

enum class Unary { kRelu, kSoftplus, kLogSigmoid, kExp, kTanh, kSin, kSquare, kSigmoid };

const char* unary_name(Unary op);

/// a[m x k] * b[k x p]. A rank-1 `a` is a row vector, a rank-1 `b` a column.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise (Hadamard) product.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);

/// x[n x h] + b[h] broadcast over rows.
Tensor add_row(const Tensor& x, const Tensor& b);
/// x[n x h] * g[h] broadcast over rows.
Tensor mul_row(const Tensor& x, const Tensor& g);

Tensor elementwise(Unary op, const Tensor& x);
inline Tensor relu(const Tensor& x) { return elementwise(Unary::kRelu, x); }
inline Tensor softplus(const Tensor& x) { return elementwise(Unary::kSoftplus, x); }
inline Tensor log_sigmoid(const Tensor& x) { return elementwise(Unary::kLogSigmoid, x); }
inline Tensor exp(const Tensor& x) { return elementwise(Unary::kExp, x); }
inline Tensor tanh(const Tensor& x) { return elementwise(Unary::kTanh, x); }
inline Tensor sin(const Tensor& x) { return elementwise(Unary::kSin, x); }
inline Tensor square(const Tensor& x) { return elementwise(Unary::kSquare, x); }
inline Tensor sigmoid(const Tensor& x) { return elementwise(Unary::kSigmoid, x); }

/// Sum of all elements; rank-0 result.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Per-row sums of x[n x h]; result has shape [n].
Tensor sum_rows(const Tensor& x);

inline constexpr double kLayerNormEpsilon = 1e-5;

/// Per-row standardization followed by gain and bias (both shape [h]).
/// Requires h >= 2.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double epsilon = kLayerNormEpsilon);

/// Rescale each row to Euclidean norm `norm` (up to a tiny epsilon).
Tensor normalize_rows(const Tensor& x, double norm, double epsilon = 1e-12);

}  // namespace lae::ad
