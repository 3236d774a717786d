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

#include "fd.hpp"
#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"
#include "lae/encoder/encoder.hpp"

namespace lae {
namespace {

using encoder::AmortizedEncoder;
using encoder::FeatureConfig;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

AmortizedEncoder mlp_encoder(const std::string& kind, std::size_t d, Rng& rng) {
  FeatureConfig cfg;
  cfg.kind = kind;
  cfg.hidden = 16;
  cfg.feature_dim = d;
  return AmortizedEncoder(encoder::make_features(cfg, 2, rng), 2);
}

TEST(Features, OneHotIsPaddedIdentity) {
  encoder::OneHotFeatures f(2, 5);
  const Matrix g = f.features(Matrix::Zero(3, 2)).to_matrix();
  Matrix expected = Matrix::Zero(3, 5);
  expected.leftCols(3) = Matrix::Identity(3, 3);
  EXPECT_EQ(g, expected);
  EXPECT_TRUE(f.parameters().empty());
}

TEST(Features, OneHotNeedsEnoughColumns) {
  encoder::OneHotFeatures f(2, 2);
  EXPECT_THROW(f.features(Matrix::Zero(3, 2)), DimensionError);
}

TEST(Features, OutputHasExactlyFeatureDimColumns) {
  Rng rng(1);
  for (const std::string kind : {"sin", "relu"}) {
    auto enc = mlp_encoder(kind, 7, rng);
    const Matrix g = enc.features(random_matrix(4, 2, rng)).to_matrix();
    EXPECT_EQ(g.rows(), 4);
    EXPECT_EQ(g.cols(), 7);
  }
}

TEST(Features, DuplicateInputsGiveIdenticalRows) {
  Rng rng(2);
  auto enc = mlp_encoder("sin", 32, rng);
  Matrix x(3, 2);
  x << 0.5, -1.0, 0.5, -1.0, 2.0, 0.1;
  const Matrix g = enc.features(x).to_matrix();
  EXPECT_EQ(g.row(0), g.row(1));
  EXPECT_EQ(encoder::rank_diagnostic(g).rank, 2u);
}

TEST(Features, RandomMlpWithWideOutputHasFullRowRank) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureConfig cfg;
    auto enc = AmortizedEncoder(encoder::make_features(cfg, 2, rng), 2);
    const auto diag = encoder::rank_diagnostic(enc.features(random_matrix(3, 2, rng)).to_matrix());
    EXPECT_EQ(diag.rank, 3u);
    EXPECT_TRUE(diag.satisfied);
  }
}

TEST(Features, RowNormIsApplied) {
  Rng rng(4);
  FeatureConfig cfg;
  cfg.row_norm = 16.0;
  auto f = encoder::make_features(cfg, 2, rng);
  const Matrix g = f->features(random_matrix(5, 2, rng)).to_matrix();
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(g.row(i).norm(), 16.0, 1e-9);
}

TEST(Features, UnknownKindThrows) {
  Rng rng(4);
  FeatureConfig cfg;
  cfg.kind = "conv";
  EXPECT_THROW(encoder::make_features(cfg, 2, rng), ConfigError);
}

TEST(Encode, ZeroPhiGivesZeroLatents) {
  Rng rng(5);
  auto enc = mlp_encoder("relu", 8, rng);
  EXPECT_TRUE(enc.encode(random_matrix(4, 2, rng)).to_matrix().isZero(0.0));
}

TEST(Encode, OneHotLatentIsColumnOfPhi) {
  AmortizedEncoder enc(std::make_unique<encoder::OneHotFeatures>(2, 4), 3);
  Rng rng(6);
  const Matrix phi = random_matrix(3, 4, rng);
  enc.set_phi(phi);
  const Matrix z = enc.encode(Matrix::Zero(4, 2)).to_matrix();
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(Vector(z.row(i).transpose()), Vector(phi.col(i)));
}

TEST(Encode, EqualsFeaturesTimesPhiTranspose) {
  Rng rng(7);
  auto enc = mlp_encoder("sin", 6, rng);
  enc.randomize_phi(0.5, rng);
  const Matrix x = random_matrix(3, 2, rng);
  const Matrix expected = enc.features(x).to_matrix() * enc.phi_matrix().transpose();
  EXPECT_TRUE(enc.encode(x).to_matrix().isApprox(expected, 1e-14));
}

TEST(Encode, GradientOfSquaredNormIsTwoZtG) {
  Rng rng(8);
  auto enc = mlp_encoder("sin", 6, rng);
  enc.randomize_phi(0.5, rng);
  const Matrix x = random_matrix(3, 2, rng);
  ad::Tensor g = ad::Tensor::constant(enc.features(x).to_matrix());
  ad::Tensor phi = enc.phi();
  phi.zero_grad();
  ad::Tensor z = enc.encode_with(g);
  ad::sum(ad::square(z)).backward();
  const Matrix expected = 2.0 * z.to_matrix().transpose() * g.to_matrix();
  Matrix got(2, 6);
  for (Eigen::Index i = 0; i < got.size(); ++i) got.data()[i] = phi.grad()[static_cast<std::size_t>(i)];
  EXPECT_TRUE(got.isApprox(expected, 1e-12));
}

TEST(Encode, PsiGradientMatchesFiniteDifferences) {
  Rng rng(9);
  FeatureConfig cfg;
  cfg.kind = "relu";
  cfg.hidden = 5;
  cfg.hidden_layers = 1;
  cfg.feature_dim = 4;
  cfg.layer_norm = true;
  cfg.row_norm = 3.0;
  AmortizedEncoder enc(encoder::make_features(cfg, 2, rng), 2);
  enc.randomize_phi(1.0, rng);
  const Matrix x = random_matrix(3, 2, rng);
  std::vector<ad::Tensor> leaves;
  for (const auto& p : enc.parameters()) leaves.push_back(p.tensor);
  EXPECT_LT(testing::gradient_error(leaves, [&] { return ad::sum(ad::sin(enc.encode(x))); }), 1e-4);
}

TEST(Encode, ParameterGroups) {
  Rng rng(10);
  auto enc = mlp_encoder("relu", 4, rng);
  ASSERT_EQ(enc.phi_parameters().size(), 1u);
  EXPECT_EQ(enc.phi_parameters()[0].name, "encoder.phi");
  EXPECT_EQ(enc.parameters().size(), enc.psi_parameters().size() + 1);
  EXPECT_THROW(enc.set_phi(Matrix::Zero(3, 4)), DimensionError);
}

TEST(RankDiagnostic, TooFewFeatureColumns) {
  Rng rng(11);
  const auto d = encoder::rank_diagnostic(random_matrix(3, 2, rng));
  EXPECT_LE(d.rank, 2u);
  EXPECT_FALSE(d.satisfied);
}

TEST(RankDiagnostic, IdentityAndWideGaussian) {
  const auto eye = encoder::rank_diagnostic(Matrix::Identity(4, 4));
  EXPECT_EQ(eye.rank, 4u);
  EXPECT_TRUE(eye.satisfied);
  Rng rng(12);
  EXPECT_TRUE(encoder::rank_diagnostic(random_matrix(3, 128, rng)).satisfied);
}

}  // namespace
}  // namespace lae
