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
#include <filesystem>
#include <fstream>

#include "fd.hpp"
#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"
#include "lae/harness/conjugate_oracle.hpp"
#include "lae/models/checkpoint.hpp"
#include "lae/models/model.hpp"

namespace lae {
namespace {

using ad::Tensor;
using models::GaussianPrior;
using models::LatentVariableModel;

constexpr double kLog2Pi = 1.8378770664093453;

double logistic_cdf(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// b with softplus(b) = 1/s^2.
double pre_for_scale(double s) { return std::log(std::expm1(1.0 / (s * s))); }

LatentVariableModel gaussian_model(const Matrix& obs) {
  return LatentVariableModel(GaussianPrior::standard(2), std::make_unique<models::GaussianLinearLikelihood>(obs));
}

TEST(Prior, StandardNormalAtOrigin) {
  const auto p = GaussianPrior::standard(2);
  EXPECT_NEAR(p.log_density(Vector::Zero(2)), -kLog2Pi, 1e-14);
}

TEST(Prior, ModeValue) {
  Matrix cov(3, 3);
  cov << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 0.7;
  Vector mu(3);
  mu << 0.5, -1.0, 2.0;
  const GaussianPrior p(mu, cov);
  EXPECT_NEAR(p.log_density(mu), -0.5 * (3.0 * kLog2Pi + std::log(cov.determinant())), 1e-12);
}

TEST(Prior, DiagonalFactorizes) {
  Matrix cov = Matrix::Zero(2, 2);
  cov(0, 0) = 2.0;
  cov(1, 1) = 3.0;
  const GaussianPrior p(Vector::Zero(2), cov);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    Vector z(2);
    z << rng.normal(), rng.normal();
    auto log_n = [](double v, double var) { return -0.5 * (std::log(2.0 * M_PI * var) + v * v / var); };
    EXPECT_NEAR(p.log_density(z), log_n(z[0], 2.0) + log_n(z[1], 3.0), 1e-12);
  }
}

TEST(Prior, TensorAndVectorPathsAgree) {
  const auto p = GaussianPrior::standard(2);
  Tensor z = Tensor::constant({3, 2}, {0.1, 0.2, -1.0, 0.5, 2.0, -0.3});
  Tensor lp = p.log_density(z);
  const Matrix zm = z.to_matrix();
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(lp(static_cast<std::size_t>(i)), p.log_density(zm.row(i).transpose()), 1e-13);
}

TEST(Prior, RejectsAsymmetricAndIndefiniteCovariance) {
  Matrix asym(2, 2);
  asym << 0.7, 0.6, 0.5, 0.8;
  EXPECT_THROW(GaussianPrior(Vector::Zero(2), asym), DomainError);
  Matrix indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussianPrior(Vector::Zero(2), indef), DomainError);
}

TEST(GaussianLikelihood, ModeValue) {
  const auto model = gaussian_model(Matrix::Identity(2, 2));
  Matrix x(1, 2);
  x << 0.4, -0.9;
  Tensor z = Tensor::constant(x);
  EXPECT_NEAR(model.log_likelihood(x, z)(0), -kLog2Pi, 1e-14);
}

TEST(Potential, OriginWithIdentityCovariances) {
  const auto model = gaussian_model(Matrix::Identity(2, 2));
  EXPECT_NEAR(model.potential(Vector::Zero(2), Vector::Zero(2)), 2.0 * kLog2Pi, 1e-13);
}

TEST(Potential, GradientVanishesAtConjugatePosteriorMean) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model();
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    Vector x(2);
    x << 2.0 * rng.normal(), 2.0 * rng.normal();
    const Vector mean = oracle.posterior(x).mean;
    Tensor z = Tensor::parameter(Matrix(mean.transpose()));
    ad::sum(model.potential(Matrix(x.transpose()), z)).backward();
    EXPECT_LT(std::hypot(z.grad()[0], z.grad()[1]), 1e-8);
  }
}

TEST(Potential, OffsetGradientMatchesFiniteDifferences) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model(true);
  const auto params = model.parameters();
  ASSERT_EQ(params.size(), 1u);
  Tensor offset = params[0].tensor;
  offset.mutable_values()[0] = 0.3;
  offset.mutable_values()[1] = -0.2;
  Matrix x(2, 2), z(2, 2);
  x << 1.0, 0.5, -0.3, 0.8;
  z << 0.2, -0.1, 0.4, 0.6;
  const double err = testing::gradient_error({offset}, [&] { return ad::sum(model.potential(x, Tensor::constant(z))); });
  EXPECT_LT(err, 1e-4);
}

TEST(Potential, GridEvaluationMatchesPerPoint) {
  const auto model = harness::toy_conjugate_oracle().make_model();
  Vector x(2);
  x << 0.7, -1.1;
  Matrix z(5, 2);
  Rng rng(2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  const Vector u = model.potential_grid(x, z, 2);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(u[i], model.potential(x, z.row(i).transpose()), 1e-12);
}

TEST(Model, RejectsDimensionMismatch) {
  EXPECT_THROW(LatentVariableModel(GaussianPrior::standard(3),
                                   std::make_unique<models::GaussianLinearLikelihood>(Matrix::Identity(2, 2))),
               DimensionError);
}

TEST(DiscretizedLogistic, CentralPixelValue) {
  const double got = models::discretized_logistic_log_prob(0.0, 0.0, 1.0);
  EXPECT_NEAR(got, std::log(logistic_cdf(1.0 / 255.0) - logistic_cdf(-1.0 / 255.0)), 1e-12);
  EXPECT_NEAR(got, -6.2344, 1e-4);
}

TEST(DiscretizedLogistic, EdgeBinSaturates) {
  const double got = models::discretized_logistic_log_prob(1.0, 40.0, 1.0);
  EXPECT_LE(got, 0.0);
  EXPECT_GT(got, -1e-15);
}

TEST(DiscretizedLogistic, MatchesCdfDifferencesAcrossGrid) {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const double mu = rng.uniform() * 2.0 - 1.0;
    const double s = 0.01 + rng.uniform();
    const int k = static_cast<int>(rng.below(256));
    const double x = models::pixel_to_unit(static_cast<std::uint8_t>(k));
    const double hi = k == 255 ? 1.0 : logistic_cdf((x + 1.0 / 255.0 - mu) / s);
    const double lo = k == 0 ? 0.0 : logistic_cdf((x - 1.0 / 255.0 - mu) / s);
    EXPECT_NEAR(models::discretized_logistic_log_prob(x, mu, 1.0 / s), std::log(hi - lo), 1e-9);
  }
}

TEST(DiscretizedLogistic, ProbabilitiesSumToOne) {
  Rng rng(2026);
  for (int t = 0; t < 100; ++t) {
    const double mu = 3.0 * rng.uniform() - 1.5;
    const double inv_s = models::inverse_scale_from_pre(14.0 * rng.uniform() - 6.0);
    double total = 0.0;
    for (int k = 0; k < 256; ++k) {
      total += std::exp(models::discretized_logistic_log_prob(models::pixel_to_unit(static_cast<std::uint8_t>(k)), mu, inv_s));
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(DiscretizedLogistic, ScaleParameterization) {
  EXPECT_NEAR(models::inverse_scale_from_pre(pre_for_scale(0.5)), 2.0, 1e-12);
}

TEST(DiscretizedLogistic, PixelOutsideRangeIsRejected) {
  EXPECT_THROW(models::discretized_logistic_log_prob(1.5, 0.0, 1.0), DomainError);
  EXPECT_THROW(models::discretized_logistic_log_prob(std::nan(""), 0.0, 1.0), DomainError);
}

TEST(DiscretizedLogistic, BatchLogLikelihoodMatchesScalarSum) {
  Rng rng(6);
  Matrix x(2, 3), mu(2, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x.data()[i] = models::pixel_to_unit(static_cast<std::uint8_t>(rng.below(256)));
    mu.data()[i] = rng.normal() * 0.5;
  }
  const double b = 0.7;
  Tensor ll = models::discretized_logistic_log_likelihood(x, Tensor::constant(mu), Tensor::scalar(b));
  for (Eigen::Index i = 0; i < 2; ++i) {
    double expected = 0.0;
    for (Eigen::Index j = 0; j < 3; ++j) {
      expected += models::discretized_logistic_log_prob(x(i, j), mu(i, j), models::inverse_scale_from_pre(b));
    }
    EXPECT_NEAR(ll(static_cast<std::size_t>(i)), expected, 1e-12);
  }
}

TEST(DiscretizedLogistic, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  Matrix x(3, 4), mu(3, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x.data()[i] = models::pixel_to_unit(static_cast<std::uint8_t>(rng.below(256)));
    mu.data()[i] = rng.normal() * 0.5;
  }
  x(0, 0) = -1.0;
  x(1, 1) = 1.0;
  Tensor m = Tensor::parameter(mu);
  Tensor b = Tensor::parameter({1}, {0.4});
  const double err =
      testing::gradient_error({m, b}, [&] { return ad::sum(models::discretized_logistic_log_likelihood(x, m, b)); });
  EXPECT_LT(err, 1e-6);
}

TEST(ScaleRegularizer, ReferenceValues) {
  EXPECT_NEAR(models::scale_regularizer(0.0, 1), 2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(models::scale_regularizer(-3.0, 100), (-3.0 + 2.0 * std::log1p(std::exp(3.0))) / 100.0, 1e-15);
  EXPECT_NEAR(models::scale_regularizer(60.0, 7), 60.0 / 7.0, 1e-12);
  EXPECT_THROW(models::scale_regularizer(0.0, 0), ConfigError);
}

TEST(ScaleRegularizer, TensorFormMatchesScalar) {
  Tensor b = Tensor::parameter({1}, {-1.3});
  Tensor r = models::scale_regularizer(b, 40);
  EXPECT_NEAR(r.item(), models::scale_regularizer(-1.3, 40), 1e-15);
  EXPECT_LT(testing::gradient_error({b}, [&] { return models::scale_regularizer(b, 40); }), 1e-7);
}

TEST(DiscretizedLogistic, SamplesLieOnPixelGrid) {
  Rng rng(3);
  ad::MlpSpec spec;
  spec.sizes = {2, 4, 6};
  ad::Mlp mlp(spec, rng);
  models::DiscretizedLogisticLikelihood lik(std::move(mlp), 0.0, 10);
  const Matrix x = lik.sample(Matrix::Zero(4, 2), rng);
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_TRUE(models::on_pixel_grid(x.data()[i]));
}

TEST(DiscretizedLogistic, RegularizerScalesWithBatchOverTrainingSize) {
  Rng rng(3);
  ad::MlpSpec spec;
  spec.sizes = {2, 3};
  models::DiscretizedLogisticLikelihood lik(ad::Mlp(spec, rng), -3.0, 100);
  EXPECT_NEAR(lik.training_regularizer(10).item(), 10.0 * models::scale_regularizer(-3.0, 100), 1e-15);
}

class CheckpointTest : public ::testing::Test {
 protected:
  std::filesystem::path path = std::filesystem::temp_directory_path() / "lae_checkpoint_test.bin";
  void TearDown() override { std::filesystem::remove(path); }
};

TEST_F(CheckpointTest, RoundTripIsExact) {
  Tensor a = Tensor::parameter({2, 3}, {1.0 / 3.0, -2.5, 1e-300, 4.0, 5.0, -0.0});
  Tensor b = Tensor::parameter({1}, {M_PI});
  const std::vector<ad::NamedTensor> saved{{"a", a}, {"b", b}};
  models::save_checkpoint(path, saved);
  Tensor a2 = Tensor::parameter({2, 3}, std::vector<double>(6, 0.0));
  Tensor b2 = Tensor::parameter({1}, {0.0});
  models::restore_checkpoint(path, std::vector<ad::NamedTensor>{{"b", b2}, {"a", a2}});
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(a.values()[i], a2.values()[i]);
  EXPECT_EQ(b2.item(), M_PI);
  const auto records = models::load_checkpoint(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].name, "a");
  EXPECT_EQ(records[0].shape, (ad::Shape{2, 3}));
}

TEST_F(CheckpointTest, MissingNameAndShapeMismatchAreFormatErrors) {
  models::save_checkpoint(path, std::vector<ad::NamedTensor>{{"a", Tensor::parameter({2}, {1, 2})}});
  EXPECT_THROW(models::restore_checkpoint(path, std::vector<ad::NamedTensor>{{"c", Tensor::parameter({2}, {0, 0})}}),
               FormatError);
  EXPECT_THROW(models::restore_checkpoint(path, std::vector<ad::NamedTensor>{{"a", Tensor::parameter({3}, {0, 0, 0})}}),
               FormatError);
}

TEST_F(CheckpointTest, TruncatedFileIsFormatError) {
  models::save_checkpoint(path, std::vector<ad::NamedTensor>{{"a", Tensor::parameter({4}, {1, 2, 3, 4})}});
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(models::load_checkpoint(path), FormatError);
}

}  // namespace
}  // namespace lae
