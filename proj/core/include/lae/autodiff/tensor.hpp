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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lae/common/types.hpp"

namespace lae::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

enum class OpKind : std::uint8_t {
  kLeaf,
  kMatMul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kAddRow,
  kMulRow,
  kElementwise,
  kSum,
  kSumRows,
  kLayerNorm,
  kNormalizeRows,
  kCustom,
};

const char* op_name(OpKind kind);

namespace detail {
struct Node;
}

class Tensor;

/// Everything a backward rule may read. `grad_in[k]` is empty when input k
/// does not participate in differentiation; rules must accumulate (+=).
struct BackwardContext {
  std::span<const double> grad_out;
  std::span<const double> out;
  std::vector<std::span<const double>> in;
  std::vector<std::span<double>> grad_in;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

/// Dense 64-bit tensor of rank 0, 1 or 2 with define-by-run reverse-mode
/// differentiation.
///
/// A Tensor is a cheap handle; copies alias the same storage. Results of
/// operations keep their inputs alive until the handle is dropped, so the
/// tape is simply the DAG reachable from whatever scalar `backward` is called
/// on. Leaves created with `parameter` accumulate gradients across calls
/// until `zero_grad`.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor constant(const Matrix& m);
  static Tensor parameter(Shape shape, std::vector<double> values);
  static Tensor parameter(const Matrix& m);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  /// Rows of a rank-2 tensor; 1 otherwise.
  std::size_t rows() const;
  /// Columns of a rank-2 tensor; size() otherwise.
  std::size_t cols() const;

  std::span<const double> values() const;
  /// Writable storage; only valid on leaves (constants or parameters).
  std::span<double> mutable_values();
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  bool requires_grad() const;
  /// Toggle gradient tracking on a leaf. Only affects tapes built afterwards.
  void set_requires_grad(bool on);
  bool is_leaf() const;
  OpKind op() const;

  void zero_grad();
  double item() const;
  double operator()(std::size_t i) const;
  double operator()(std::size_t r, std::size_t c) const;
  Matrix to_matrix() const;

  /// Constant copy of the current values, cut from the tape.
  Tensor detach() const;

  /// Reverse sweep from this scalar. Every reachable node is visited once.
  void backward() const;

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  friend Tensor make_op(OpKind, Shape, std::vector<double>, std::vector<Tensor>,
                        BackwardFn);

  std::shared_ptr<detail::Node> node_;
};

/// Build an operation result. Throws NumericError if any value is non-finite.
/// Inputs and the backward rule are dropped when no input requires grad.
Tensor make_op(OpKind kind, Shape shape, std::vector<double> values,
               std::vector<Tensor> inputs, BackwardFn backward);

/// Named handle used for parameter collections and checkpoints.
struct NamedTensor {
  std::string name;
  Tensor tensor;
};

void zero_grads(std::span<const NamedTensor> params);

/// Stops gradient tracking on a set of parameters for the guard's lifetime,
/// so tapes built meanwhile carry no branches into them.
class FreezeGuard {
 public:
  explicit FreezeGuard(std::vector<NamedTensor> params);
  ~FreezeGuard();
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  std::vector<NamedTensor> params_;
  std::vector<bool> previous_;
};

}  // namespace lae::ad
