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

#include "lae/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>

#include "lae/autodiff/numerics.hpp"
#include "lae/common/error.hpp"

namespace lae::ad {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(std::span<const double> s, std::size_t r, std::size_t c) {
  return ConstMap(s.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

MutMap view(std::span<double> s, std::size_t r, std::size_t c) {
  return MutMap(s.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

void require_same_shape(const char* what, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

void require_matrix(const char* what, const Tensor& x) {
  if (x.rank() != 2) {
    throw DimensionError(std::string(what) + ": expected a matrix, got " +
                         shape_string(x.shape()));
  }
}

void require_row_vector(const char* what, const Tensor& v, std::size_t h) {
  if (v.rank() != 1 || v.size() != h) {
    throw DimensionError(std::string(what) + ": expected shape [" + std::to_string(h) +
                         "], got " + shape_string(v.shape()));
  }
}

}  // namespace

const char* unary_name(Unary op) {
  switch (op) {
    case Unary::kRelu: return "relu";
    case Unary::kSoftplus: return "softplus";
    case Unary::kLogSigmoid: return "log_sigmoid";
    case Unary::kExp: return "exp";
    case Unary::kTanh: return "tanh";
    case Unary::kSin: return "sin";
    case Unary::kSquare: return "square";
    case Unary::kSigmoid: return "sigmoid";
  }
  return "unknown";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.rows(), k = a.cols();
  const std::size_t k2 = b.rank() == 2 ? b.rows() : b.size();
  const std::size_t p = b.rank() == 2 ? b.cols() : 1;
  if (k != k2) {
    throw DimensionError("matmul: inner dimensions disagree " + shape_string(a.shape()) + " * " +
                         shape_string(b.shape()));
  }
  std::vector<double> out(m * p);
  view(std::span<double>(out), m, p).noalias() = view(a.values(), m, k) * view(b.values(), k, p);
  return make_op(OpKind::kMatMul, {m, p}, std::move(out), {a, b},
                 [m, k, p](const BackwardContext& ctx) {
                   auto dy = view(ctx.grad_out, m, p);
                   if (!ctx.grad_in[0].empty()) {
                     view(ctx.grad_in[0], m, k).noalias() += dy * view(ctx.in[1], k, p).transpose();
                   }
                   if (!ctx.grad_in[1].empty()) {
                     view(ctx.grad_in[1], k, p).noalias() += view(ctx.in[0], m, k).transpose() * dy;
                   }
                 });
}

Tensor transpose(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  view(std::span<double>(out), c, r) = view(a.values(), r, c).transpose();
  return make_op(OpKind::kTranspose, {c, r}, std::move(out), {a},
                 [r, c](const BackwardContext& ctx) {
                   view(ctx.grad_in[0], r, c) += view(ctx.grad_out, c, r).transpose();
                 });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.size());
  auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_op(OpKind::kAdd, a.shape(), std::move(out), {a, b}, [](const BackwardContext& ctx) {
    for (auto& g : ctx.grad_in) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad_out[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.size());
  auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_op(OpKind::kSub, a.shape(), std::move(out), {a, b}, [](const BackwardContext& ctx) {
    auto ga = ctx.grad_in[0], gb = ctx.grad_in[1];
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += ctx.grad_out[i];
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= ctx.grad_out[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.size());
  auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_op(OpKind::kMul, a.shape(), std::move(out), {a, b}, [](const BackwardContext& ctx) {
    auto ga = ctx.grad_in[0], gb = ctx.grad_in[1];
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += ctx.grad_out[i] * ctx.in[1][i];
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += ctx.grad_out[i] * ctx.in[0][i];
  });
}

Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= s;
  return make_op(OpKind::kScale, a.shape(), std::move(out), {a}, [s](const BackwardContext& ctx) {
    auto g = ctx.grad_in[0];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * ctx.grad_out[i];
  });
}

Tensor add_scalar(const Tensor& a, double s) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v += s;
  return make_op(OpKind::kAddScalar, a.shape(), std::move(out), {a},
                 [](const BackwardContext& ctx) {
                   auto g = ctx.grad_in[0];
                   for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.grad_out[i];
                 });
}

Tensor add_row(const Tensor& x, const Tensor& b) {
  require_matrix("add_row", x);
  const std::size_t n = x.rows(), h = x.cols();
  require_row_vector("add_row", b, h);
  std::vector<double> out(n * h);
  auto xv = x.values(), bv = b.values();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < h; ++c) out[r * h + c] = xv[r * h + c] + bv[c];
  }
  return make_op(OpKind::kAddRow, x.shape(), std::move(out), {x, b},
                 [n, h](const BackwardContext& ctx) {
                   auto gx = ctx.grad_in[0], gb = ctx.grad_in[1];
                   for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += ctx.grad_out[i];
                   if (!gb.empty()) {
                     for (std::size_t r = 0; r < n; ++r) {
                       for (std::size_t c = 0; c < h; ++c) gb[c] += ctx.grad_out[r * h + c];
                     }
                   }
                 });
}

Tensor mul_row(const Tensor& x, const Tensor& g) {
  require_matrix("mul_row", x);
  const std::size_t n = x.rows(), h = x.cols();
  require_row_vector("mul_row", g, h);
  std::vector<double> out(n * h);
  auto xv = x.values(), gv = g.values();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < h; ++c) out[r * h + c] = xv[r * h + c] * gv[c];
  }
  return make_op(OpKind::kMulRow, x.shape(), std::move(out), {x, g},
                 [n, h](const BackwardContext& ctx) {
                   auto gx = ctx.grad_in[0], gg = ctx.grad_in[1];
                   for (std::size_t r = 0; r < n; ++r) {
                     for (std::size_t c = 0; c < h; ++c) {
                       const double dy = ctx.grad_out[r * h + c];
                       if (!gx.empty()) gx[r * h + c] += dy * ctx.in[1][c];
                       if (!gg.empty()) gg[c] += dy * ctx.in[0][r * h + c];
                     }
                   }
                 });
}

Tensor elementwise(Unary op, const Tensor& x) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xv[i];
    switch (op) {
      case Unary::kRelu: out[i] = v > 0.0 ? v : 0.0; break;
      case Unary::kSoftplus: out[i] = numerics::softplus(v); break;
      case Unary::kLogSigmoid: out[i] = numerics::log_sigmoid(v); break;
      case Unary::kExp: out[i] = std::exp(v); break;
      case Unary::kTanh: out[i] = std::tanh(v); break;
      case Unary::kSin: out[i] = std::sin(v); break;
      case Unary::kSquare: out[i] = v * v; break;
      case Unary::kSigmoid: out[i] = numerics::sigmoid(v); break;
    }
  }
  return make_op(OpKind::kElementwise, x.shape(), std::move(out), {x},
                 [op](const BackwardContext& ctx) {
                   auto g = ctx.grad_in[0];
                   for (std::size_t i = 0; i < g.size(); ++i) {
                     const double v = ctx.in[0][i], y = ctx.out[i], dy = ctx.grad_out[i];
                     double d = 0.0;
                     switch (op) {
                       case Unary::kRelu: d = v > 0.0 ? 1.0 : 0.0; break;
                       case Unary::kSoftplus: d = numerics::sigmoid(v); break;
                       case Unary::kLogSigmoid: d = numerics::sigmoid(-v); break;
                       case Unary::kExp: d = y; break;
                       case Unary::kTanh: d = 1.0 - y * y; break;
                       case Unary::kSin: d = std::cos(v); break;
                       case Unary::kSquare: d = 2.0 * v; break;
                       case Unary::kSigmoid: d = y * (1.0 - y); break;
                     }
                     g[i] += d * dy;
                   }
                 });
}

Tensor sum(const Tensor& x) {
  auto xv = x.values();
  double s = 0.0;
  for (double v : xv) s += v;
  return make_op(OpKind::kSum, {}, {s}, {x}, [](const BackwardContext& ctx) {
    const double dy = ctx.grad_out[0];
    for (double& g : ctx.grad_in[0]) g += dy;
  });
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor sum_rows(const Tensor& x) {
  const std::size_t n = x.rows(), h = x.cols();
  auto xv = x.values();
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < h; ++c) out[r] += xv[r * h + c];
  }
  return make_op(OpKind::kSumRows, {n}, std::move(out), {x}, [n, h](const BackwardContext& ctx) {
    auto g = ctx.grad_in[0];
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < h; ++c) g[r * h + c] += ctx.grad_out[r];
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double epsilon) {
  require_matrix("layer_norm", x);
  const std::size_t n = x.rows(), h = x.cols();
  if (h < 2) throw DimensionError("layer_norm: need at least 2 features per row");
  require_row_vector("layer_norm gain", gain, h);
  require_row_vector("layer_norm bias", bias, h);

  auto xv = x.values(), gv = gain.values(), bv = bias.values();
  auto xhat = std::make_shared<std::vector<double>>(n * h);
  auto inv_std = std::make_shared<std::vector<double>>(n);
  std::vector<double> out(n * h);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = xv.data() + r * h;
    double mu = 0.0;
    for (std::size_t c = 0; c < h; ++c) mu += row[c];
    mu /= static_cast<double>(h);
    double var = 0.0;
    for (std::size_t c = 0; c < h; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<double>(h);
    const double inv = 1.0 / std::sqrt(var + epsilon);
    (*inv_std)[r] = inv;
    for (std::size_t c = 0; c < h; ++c) {
      const double xh = (row[c] - mu) * inv;
      (*xhat)[r * h + c] = xh;
      out[r * h + c] = xh * gv[c] + bv[c];
    }
  }
  return make_op(
      OpKind::kLayerNorm, x.shape(), std::move(out), {x, gain, bias},
      [n, h, xhat, inv_std](const BackwardContext& ctx) {
        auto gx = ctx.grad_in[0], gg = ctx.grad_in[1], gb = ctx.grad_in[2];
        const auto& xh = *xhat;
        std::vector<double> dxhat(h);
        for (std::size_t r = 0; r < n; ++r) {
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t c = 0; c < h; ++c) {
            const std::size_t i = r * h + c;
            const double dy = ctx.grad_out[i];
            if (!gg.empty()) gg[c] += dy * xh[i];
            if (!gb.empty()) gb[c] += dy;
            dxhat[c] = dy * ctx.in[1][c];
            mean_d += dxhat[c];
            mean_dx += dxhat[c] * xh[i];
          }
          if (gx.empty()) continue;
          mean_d /= static_cast<double>(h);
          mean_dx /= static_cast<double>(h);
          const double inv = (*inv_std)[r];
          for (std::size_t c = 0; c < h; ++c) {
            const std::size_t i = r * h + c;
            gx[i] += inv * (dxhat[c] - mean_d - xh[i] * mean_dx);
          }
        }
      });
}

Tensor normalize_rows(const Tensor& x, double norm, double epsilon) {
  require_matrix("normalize_rows", x);
  const std::size_t n = x.rows(), h = x.cols();
  auto xv = x.values();
  auto lengths = std::make_shared<std::vector<double>>(n);
  std::vector<double> out(n * h);
  for (std::size_t r = 0; r < n; ++r) {
    double ss = epsilon;
    for (std::size_t c = 0; c < h; ++c) ss += xv[r * h + c] * xv[r * h + c];
    const double len = std::sqrt(ss);
    (*lengths)[r] = len;
    for (std::size_t c = 0; c < h; ++c) out[r * h + c] = norm * xv[r * h + c] / len;
  }
  return make_op(OpKind::kNormalizeRows, x.shape(), std::move(out), {x},
                 [n, h, norm, lengths](const BackwardContext& ctx) {
                   auto gx = ctx.grad_in[0];
                   for (std::size_t r = 0; r < n; ++r) {
                     const double len = (*lengths)[r];
                     double dot = 0.0;
                     for (std::size_t c = 0; c < h; ++c) {
                       dot += ctx.in[0][r * h + c] * ctx.grad_out[r * h + c];
                     }
                     const double len3 = len * len * len;
                     for (std::size_t c = 0; c < h; ++c) {
                       const std::size_t i = r * h + c;
                       gx[i] += norm * (ctx.grad_out[i] / len - ctx.in[0][i] * dot / len3);
                     }
                   }
                 });
}

}  // namespace lae::ad
