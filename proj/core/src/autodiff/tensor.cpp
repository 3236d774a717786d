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

#include "lae/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "lae/common/error.hpp"

namespace lae::ad {

namespace detail {

struct Node {
  OpKind kind = OpKind::kLeaf;
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Whether each input required gradients when this node was built.
  std::vector<char> tracked;
  BackwardFn backward;
};

}  // namespace detail

namespace {

using detail::Node;

void check_rank(const Shape& shape) {
  if (shape.size() > 2) {
    throw DimensionError("tensors of rank > 2 are not supported: " + shape_string(shape));
  }
}

std::shared_ptr<Node> make_leaf(Shape shape, std::vector<double> values, bool requires_grad) {
  check_rank(shape);
  if (shape_size(shape) != values.size()) {
    throw DimensionError("shape " + shape_string(shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in leaf tensor");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return node;
}

std::vector<double> matrix_values(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kAddScalar: return "add_scalar";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kMulRow: return "mul_row";
    case OpKind::kElementwise: return "elementwise";
    case OpKind::kSum: return "sum";
    case OpKind::kSumRows: return "sum_rows";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kNormalizeRows: return "normalize_rows";
    case OpKind::kCustom: return "custom";
  }
  return "unknown";
}

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return Tensor(make_leaf(std::move(shape), std::move(values), false));
}

Tensor Tensor::constant(const Matrix& m) {
  return constant({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                  matrix_values(m));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values) {
  return Tensor(make_leaf(std::move(shape), std::move(values), true));
}

Tensor Tensor::parameter(const Matrix& m) {
  return parameter({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                   matrix_values(m));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(make_leaf({}, {value}, requires_grad));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_size(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0), requires_grad));
}

const Shape& Tensor::shape() const {
  if (!node_) throw ContractError("use of an undefined tensor");
  return node_->shape;
}

std::size_t Tensor::size() const { return node_ ? node_->value.size() : 0; }

std::size_t Tensor::rows() const { return rank() == 2 ? shape()[0] : 1; }

std::size_t Tensor::cols() const { return rank() == 2 ? shape()[1] : size(); }

std::span<const double> Tensor::values() const {
  if (!node_) throw ContractError("use of an undefined tensor");
  return node_->value;
}

std::span<double> Tensor::mutable_values() {
  if (!node_) throw ContractError("use of an undefined tensor");
  if (node_->kind != OpKind::kLeaf) {
    throw ContractError("only leaf tensors may be modified in place");
  }
  return node_->value;
}

std::span<const double> Tensor::grad() const {
  if (!node_) throw ContractError("use of an undefined tensor");
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  if (!node_) throw ContractError("use of an undefined tensor");
  if (node_->grad.size() != node_->value.size()) node_->grad.assign(node_->value.size(), 0.0);
  return node_->grad;
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool on) {
  if (!node_) throw ContractError("use of an undefined tensor");
  if (node_->kind != OpKind::kLeaf) throw ContractError("set_requires_grad on a non-leaf tensor");
  node_->requires_grad = on;
}

bool Tensor::is_leaf() const { return node_ && node_->kind == OpKind::kLeaf; }

OpKind Tensor::op() const { return node_ ? node_->kind : OpKind::kLeaf; }

void Tensor::zero_grad() {
  if (node_) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

double Tensor::item() const {
  if (size() != 1) throw ContractError("item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

double Tensor::operator()(std::size_t i) const { return values()[i]; }

double Tensor::operator()(std::size_t r, std::size_t c) const { return values()[r * cols() + c]; }

Matrix Tensor::to_matrix() const {
  Matrix m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  std::copy(values().begin(), values().end(), m.data());
  return m;
}

Tensor Tensor::detach() const {
  return Tensor(make_leaf(shape(), node_->value, false));
}

void Tensor::backward() const {
  if (!node_) throw ContractError("backward on an undefined tensor");
  if (node_->value.size() != 1) {
    throw ContractError("backward requires a scalar root, got " + shape_string(node_->shape));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS: `order` ends up topologically sorted with
  // inputs before consumers.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      const std::size_t k = next++;
      Node* child = node->inputs[k].get();
      if (node->tracked[k] && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* node : order) {
    if (node->kind == OpKind::kLeaf) {
      if (node->grad.size() != node->value.size()) node->grad.assign(node->value.size(), 0.0);
    } else {
      node->grad.assign(node->value.size(), 0.0);
    }
  }
  node_->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->kind == OpKind::kLeaf) continue;
    BackwardContext ctx;
    ctx.grad_out = node->grad;
    ctx.out = node->value;
    ctx.in.reserve(node->inputs.size());
    ctx.grad_in.reserve(node->inputs.size());
    for (std::size_t k = 0; k < node->inputs.size(); ++k) {
      const auto& input = node->inputs[k];
      ctx.in.emplace_back(input->value);
      if (node->tracked[k]) {
        ctx.grad_in.emplace_back(input->grad);
      } else {
        ctx.grad_in.emplace_back();
      }
    }
    node->backward(ctx);
  }

  // Interior gradients are scratch space for this sweep only.
  for (Node* node : order) {
    if (node->kind != OpKind::kLeaf) {
      node->grad.clear();
      node->grad.shrink_to_fit();
    }
  }
}

Tensor make_op(OpKind kind, Shape shape, std::vector<double> values, std::vector<Tensor> inputs,
               BackwardFn backward) {
  check_rank(shape);
  if (shape_size(shape) != values.size()) {
    throw DimensionError(std::string(op_name(kind)) + ": result shape " + shape_string(shape) +
                         " does not match value count");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op_name(kind));
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad =
      std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (node->requires_grad) {
    node->inputs.reserve(inputs.size());
    node->tracked.reserve(inputs.size());
    for (auto& t : inputs) {
      node->tracked.push_back(t.requires_grad() ? 1 : 0);
      node->inputs.push_back(std::move(t.node_));
    }
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

void zero_grads(std::span<const NamedTensor> params) {
  for (const auto& p : params) {
    Tensor t = p.tensor;
    t.zero_grad();
  }
}

FreezeGuard::FreezeGuard(std::vector<NamedTensor> params) : params_(std::move(params)) {
  previous_.reserve(params_.size());
  for (auto& p : params_) {
    previous_.push_back(p.tensor.requires_grad());
    p.tensor.set_requires_grad(false);
  }
}

FreezeGuard::~FreezeGuard() {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i].tensor.set_requires_grad(previous_[i]);
}

}  // namespace lae::ad
