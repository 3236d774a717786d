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

#include <gtest/gtest.h>

#include <cmath>

#include "fd.hpp"
#include "lae/autodiff/nn.hpp"
#include "lae/autodiff/ops.hpp"
#include "lae/autodiff/optim.hpp"
#include "lae/common/error.hpp"
#include "lae/common/rng.hpp"

namespace lae {
namespace {

using ad::Tensor;
using testing::gradient_error;

Tensor random_parameter(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  std::vector<double> v(r * c);
  for (double& x : v) x = scale * rng.normal();
  return Tensor::parameter({r, c}, v);
}

TEST(Matmul, IdentityLeavesVectorUnchanged) {
  Tensor eye = Tensor::constant({2, 2}, {1, 0, 0, 1});
  Tensor v = Tensor::constant({2, 1}, {0.3, -1.7});
  Tensor y = ad::matmul(eye, v);
  EXPECT_EQ(y(0, 0), 0.3);
  EXPECT_EQ(y(1, 0), -1.7);
}

TEST(Matmul, HandArithmetic) {
  Tensor a = Tensor::constant({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::constant({2, 1}, {1, 1});
  Tensor y = ad::matmul(a, b);
  EXPECT_EQ(y.shape(), (ad::Shape{2, 1}));
  EXPECT_EQ(y(0, 0), 3.0);
  EXPECT_EQ(y(1, 0), 7.0);
}

TEST(Matmul, InnerDimensionMismatchThrows) {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({2, 3});
  EXPECT_THROW(ad::matmul(a, b), DimensionError);
}

TEST(Matmul, GradientMatchesFiniteDifferences) {
  Rng rng(11);
  Tensor a = random_parameter(3, 4, rng);
  Tensor b = random_parameter(4, 2, rng);
  const double err = gradient_error({a, b}, [&] { return ad::sum(ad::matmul(a, b)); }, 1e-5);
  EXPECT_LT(err, 1e-6);
}

TEST(Elementwise, ReferenceValues) {
  Tensor x = Tensor::constant({1, 3}, {0.0, -3.0, 5.0});
  EXPECT_NEAR(ad::softplus(x)(0), std::log(2.0), 1e-15);
  EXPECT_EQ(ad::relu(x)(1), 0.0);
  EXPECT_EQ(ad::relu(x)(2), 5.0);
}

TEST(Elementwise, LogSigmoidIsStableForLargeMagnitudes) {
  Tensor x = Tensor::constant({1, 4}, {-50.0, -700.0, 700.0, 50.0});
  Tensor y = ad::log_sigmoid(x);
  // log sigma(-50) = -50 - log1p(e^-50).
  EXPECT_NEAR(y(0), -50.0 - std::log1p(std::exp(-50.0)), 1e-12);
  EXPECT_NEAR(y(1), -700.0, 1e-12);
  EXPECT_NEAR(y(2), 0.0, 1e-300);
  EXPECT_NEAR(y(3), -std::exp(-50.0), 1e-30);
  Tensor s = ad::softplus(Tensor::constant({1, 2}, {700.0, -700.0}));
  EXPECT_NEAR(s(0), 700.0, 1e-12);
  EXPECT_TRUE(std::isfinite(s(1)));
}

class ElementwiseGradient : public ::testing::TestWithParam<ad::Unary> {};

TEST_P(ElementwiseGradient, MatchesFiniteDifferences) {
  Rng rng(7);
  Tensor x = random_parameter(4, 5, rng);
  // Keep relu inputs away from the kink.
  for (double& v : x.mutable_values()) {
    if (std::abs(v) < 0.05) v += 0.2;
  }
  Tensor w = Tensor::constant(random_parameter(4, 5, rng).to_matrix());
  const double err = gradient_error({x}, [&] { return ad::sum(ad::mul(ad::elementwise(GetParam(), x), w)); });
  EXPECT_LT(err, 1e-6) << ad::unary_name(GetParam());
}

INSTANTIATE_TEST_SUITE_P(AllOps, ElementwiseGradient,
                         ::testing::Values(ad::Unary::kRelu, ad::Unary::kSoftplus, ad::Unary::kLogSigmoid,
                                           ad::Unary::kExp, ad::Unary::kTanh, ad::Unary::kSin, ad::Unary::kSquare,
                                           ad::Unary::kSigmoid));

TEST(LayerNorm, ConstantRowNormalizesToZero) {
  Tensor x = Tensor::constant({1, 4}, {2.5, 2.5, 2.5, 2.5});
  Tensor g = Tensor::constant({4}, {1, 1, 1, 1});
  Tensor b = Tensor::constant({4}, {0, 0, 0, 0});
  Tensor y = ad::layer_norm(x, g, b);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(y(0, j), 0.0);
}

TEST(LayerNorm, ZeroMeanRow) {
  Tensor x = Tensor::constant({1, 2}, {1.0, -1.0});
  Tensor g = Tensor::constant({2}, {1, 1});
  Tensor b = Tensor::constant({2}, {0, 0});
  Tensor y = ad::layer_norm(x, g, b);
  const double expected = 1.0 / std::sqrt(1.0 + ad::kLayerNormEpsilon);
  EXPECT_NEAR(y(0, 0), expected, 1e-15);
  EXPECT_NEAR(y(0, 1), -expected, 1e-15);
}

TEST(LayerNorm, SingleColumnIsRejected) {
  Tensor x = Tensor::zeros({3, 1});
  Tensor g = Tensor::zeros({1});
  EXPECT_THROW(ad::layer_norm(x, g, g), DimensionError);
}

TEST(LayerNorm, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  Tensor x = random_parameter(3, 5, rng);
  Tensor g = random_parameter(1, 5, rng);
  Tensor b = random_parameter(1, 5, rng);
  Tensor gv = Tensor::parameter({5}, std::vector<double>(g.values().begin(), g.values().end()));
  Tensor bv = Tensor::parameter({5}, std::vector<double>(b.values().begin(), b.values().end()));
  Tensor w = Tensor::constant(random_parameter(3, 5, rng).to_matrix());
  const double err =
      gradient_error({x, gv, bv}, [&] { return ad::sum(ad::mul(ad::layer_norm(x, gv, bv), w)); }, 1e-5);
  EXPECT_LT(err, 1e-4);
}

TEST(NormalizeRows, RowsGetRequestedNormAndGradientMatches) {
  Rng rng(5);
  Tensor x = random_parameter(3, 4, rng);
  Tensor y = ad::normalize_rows(x, 16.0);
  for (std::size_t i = 0; i < 3; ++i) {
    double n2 = 0.0;
    for (std::size_t j = 0; j < 4; ++j) n2 += y(i, j) * y(i, j);
    EXPECT_NEAR(std::sqrt(n2), 16.0, 1e-9);
  }
  Tensor w = Tensor::constant(random_parameter(3, 4, rng).to_matrix());
  EXPECT_LT(gradient_error({x}, [&] { return ad::sum(ad::mul(ad::normalize_rows(x, 16.0), w)); }), 1e-6);
}

TEST(Broadcast, AddRowMulRowSumRowsGradients) {
  Rng rng(9);
  Tensor x = random_parameter(3, 4, rng);
  Tensor r = Tensor::parameter({4}, {0.1, -0.2, 0.3, 0.4});
  Tensor w = Tensor::constant(random_parameter(3, 4, rng).to_matrix());
  auto loss = [&] {
    Tensor y = ad::mul_row(ad::add_row(x, r), r);
    return ad::sum(ad::square(ad::sum_rows(ad::mul(y, w))));
  };
  EXPECT_LT(gradient_error({x, r}, loss), 1e-6);
}

TEST(Backward, SumGivesOnes) {
  Tensor x = Tensor::parameter({2, 3}, {1, 2, 3, 4, 5, 6});
  ad::sum(x).backward();
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, HalfSquaredNormGivesInput) {
  Tensor x = Tensor::parameter({4}, {0.5, -1.5, 2.0, 3.25});
  ad::scale(ad::sum(ad::square(x)), 0.5).backward();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(x.grad()[i], x.values()[i]);
}

TEST(Backward, NonScalarRootThrows) {
  Tensor x = Tensor::parameter({2}, {1, 2});
  EXPECT_THROW(ad::scale(x, 2.0).backward(), ContractError);
}

TEST(Backward, RepeatedCallsAccumulate) {
  Tensor x = Tensor::parameter({2}, {1, 2});
  Tensor root = ad::sum(ad::square(x));
  root.backward();
  root.backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 8.0);
}

TEST(Backward, SumOfRootsEqualsSeparatePasses) {
  Rng rng(13);
  Tensor x = random_parameter(2, 3, rng);
  auto f = [&] { return ad::sum(ad::tanh(x)); };
  auto g = [&] { return ad::sum(ad::exp(ad::scale(x, 0.3))); };
  ad::add(f(), g()).backward();
  const std::vector<double> joint(x.grad().begin(), x.grad().end());
  x.zero_grad();
  f().backward();
  g().backward();
  for (std::size_t i = 0; i < joint.size(); ++i) EXPECT_NEAR(joint[i], x.grad()[i], 1e-15);
}

TEST(Backward, LeafScalarSetsOwnGradient) {
  Tensor s = Tensor::scalar(3.0, true);
  Tensor other = Tensor::parameter({2}, {1, 2});
  s.backward();
  EXPECT_EQ(s.grad()[0], 1.0);
  for (double g : other.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Backward, SharedSubexpressionVisitedOnce) {
  Tensor x = Tensor::parameter({1}, {2.0});
  Tensor y = ad::square(x);
  Tensor root = ad::sum(ad::add(y, y));
  root.backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 8.0);
}

TEST(Tensor, NonFiniteValuesSurfaceAsErrors) {
  EXPECT_THROW(Tensor::constant({2}, {1.0, std::nan("")}), NumericError);
  Tensor big = Tensor::constant({1}, {800.0});
  EXPECT_THROW(ad::exp(big), NumericError);
}

TEST(Tensor, ShapeAndValueCountMustAgree) {
  EXPECT_THROW(Tensor::constant({2, 2}, {1, 2, 3}), DimensionError);
}

TEST(FreezeGuard, FrozenLeafGetsNoGradientAndIsRestored) {
  Tensor w = Tensor::parameter({2}, {1, 2});
  {
    ad::FreezeGuard guard({{"w", w}});
    EXPECT_FALSE(w.requires_grad());
    Tensor x = Tensor::parameter({2}, {3, 4});
    ad::sum(ad::mul(w, x)).backward();
    EXPECT_EQ(x.grad()[0], 1.0);
    for (double g : w.grad()) EXPECT_EQ(g, 0.0);
  }
  EXPECT_TRUE(w.requires_grad());
}

TEST(FreezeGuard, TapeBuiltWhileFrozenStaysFrozenAfterRestore) {
  Tensor w = Tensor::parameter({2}, {1, 2});
  Tensor x = Tensor::parameter({2}, {3, 4});
  Tensor frozen_loss;
  {
    ad::FreezeGuard guard({{"w", w}});
    frozen_loss = ad::sum(ad::mul(w, x));
  }
  Tensor live_loss = ad::sum(ad::mul(w, w));
  ad::add(frozen_loss, live_loss).backward();
  EXPECT_EQ(w.grad()[0], 2.0);
  EXPECT_EQ(w.grad()[1], 4.0);
  EXPECT_EQ(x.grad()[0], 1.0);
  EXPECT_EQ(x.grad()[1], 2.0);
}

TEST(Mlp, ThreeLayerGradientMatchesFiniteDifferences) {
  Rng rng(17);
  ad::MlpSpec spec;
  spec.sizes = {3, 5, 4, 2};
  spec.hidden_activation = ad::Activation::kTanh;
  spec.layer_norm = true;
  spec.init = {ad::InitSpec::Kind::kHe, 1.0, 0.1};
  ad::Mlp mlp(spec, rng);
  Tensor x = random_parameter(4, 3, rng);
  std::vector<Tensor> leaves{x};
  for (const auto& p : mlp.parameters("m")) leaves.push_back(p.tensor);
  EXPECT_LT(gradient_error(leaves, [&] { return ad::sum(ad::sin(mlp.forward(x))); }), 1e-4);
}

TEST(Mlp, ParameterNamesAndInitScales) {
  Rng rng(1);
  ad::MlpSpec spec;
  spec.sizes = {2, 400, 1};
  spec.init = {ad::InitSpec::Kind::kNormal, 0.2, 0.1};
  ad::Mlp mlp(spec, rng);
  const auto params = mlp.parameters("dec");
  ASSERT_EQ(params.size(), 4u);
  EXPECT_EQ(params[0].name, "dec.layer0.weight");
  const auto w = params[0].tensor.values();
  double ss = 0.0;
  for (double v : w) ss += v * v;
  EXPECT_NEAR(std::sqrt(ss / static_cast<double>(w.size())), 0.2, 0.02);
}

TEST(Optim, SgdStep) {
  Tensor w = Tensor::parameter({2}, {1.0, -1.0});
  ad::Sgd opt({{"w", w}}, 0.1);
  ad::sum(ad::square(w)).backward();
  opt.step();
  EXPECT_DOUBLE_EQ(w.values()[0], 0.8);
  EXPECT_DOUBLE_EQ(w.values()[1], -0.8);
}

TEST(Optim, AdamFirstStepMovesByLearningRate) {
  Tensor w = Tensor::parameter({2}, {1.0, -3.0});
  ad::Adam opt({{"w", w}}, 0.01);
  ad::sum(ad::square(w)).backward();
  opt.step();
  // Bias-corrected first step is lr * g / (|g| + eps).
  EXPECT_NEAR(w.values()[0], 0.99, 1e-9);
  EXPECT_NEAR(w.values()[1], -2.99, 1e-9);
}

TEST(Optim, UnknownKindThrows) {
  Tensor w = Tensor::parameter({1}, {0.0});
  EXPECT_THROW(ad::make_optimizer("rmsprop", {{"w", w}}, 0.1), ConfigError);
}

}  // namespace
}  // namespace lae
