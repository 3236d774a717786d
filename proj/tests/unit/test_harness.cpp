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
#include <sstream>

#include "lae/common/error.hpp"
#include "lae/harness/config.hpp"
#include "lae/harness/conjugate_oracle.hpp"
#include "lae/harness/experiments.hpp"
#include "lae/harness/grid_oracle.hpp"
#include "lae/harness/idx.hpp"
#include "lae/harness/metrics.hpp"
#include "lae/harness/synthetic.hpp"
#include "lae/harness/vi.hpp"

namespace lae {
namespace {

namespace fs = std::filesystem;
using harness::ConjugateOracle;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lae_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST(Conjugate, EqualPrecisionAveragesObservation) {
  ConjugateOracle oracle(Vector::Zero(2), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  Vector x(2);
  x << 1.4, -0.6;
  const auto post = oracle.posterior(x);
  EXPECT_TRUE(post.mean.isApprox(x / 2.0, 1e-15));
  EXPECT_TRUE(post.covariance.isApprox(Matrix::Identity(2, 2) / 2.0, 1e-15));
}

TEST(Conjugate, ObservationAtPriorMeanIsFixed) {
  Vector mu(2);
  mu << 0.3, -1.1;
  Matrix sz(2, 2), sx(2, 2);
  sz << 2.0, 0.4, 0.4, 0.5;
  sx << 0.7, 0.6, 0.6, 0.8;
  ConjugateOracle oracle(mu, sz, sx);
  EXPECT_TRUE(oracle.posterior(mu).mean.isApprox(mu, 1e-14));
}

TEST(Conjugate, RejectsNonSpdInputs) {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(ConjugateOracle(Vector::Zero(2), Matrix::Identity(2, 2), bad), DomainError);
}

TEST(Conjugate, LogMarginalMatchesGaussianFormula) {
  const auto oracle = harness::toy_conjugate_oracle();
  Vector x(2);
  x << 0.5, 1.5;
  const Matrix s = oracle.prior_cov() + oracle.obs_cov();
  const double quad = x.dot(s.inverse() * x);
  const double expected = -std::log(2.0 * M_PI) - 0.5 * std::log(s.determinant()) - 0.5 * quad;
  EXPECT_NEAR(oracle.log_marginal(x), expected, 1e-12);
}

TEST(Grid, AgreesWithClosedForm) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model();
  Vector x(2);
  x << 1.1, -0.7;
  const auto post = oracle.posterior(x);
  const auto grid = harness::build_grid_oracle(model, x, harness::GridBounds::around(post.mean, post.covariance));
  EXPECT_NEAR(grid.mass().sum(), 1.0, 1e-9);
  EXPECT_LT((grid.mean() - post.mean).norm(), 1e-3);
  EXPECT_LT((grid.covariance() - post.covariance).norm(), 5e-3);
}

TEST(Grid, ResolutionDoublingConverges) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model();
  Vector x(2);
  x << -0.4, 0.9;
  const auto post = oracle.posterior(x);
  const auto bounds = harness::GridBounds::around(post.mean, post.covariance);
  const auto coarse = harness::build_grid_oracle(model, x, bounds, 200);
  const auto fine = harness::build_grid_oracle(model, x, bounds, 400);
  EXPECT_LT((coarse.mean() - fine.mean()).norm(), 1e-4);
}

TEST(Grid, UniformDensityHasBoxCentreMean) {
  harness::GridBounds b;
  b.lo = {-1.0, 2.0};
  b.hi = {3.0, 2.5};
  harness::GridOracle grid([](const Matrix& z) { return Vector::Zero(z.rows()); }, b, 50);
  EXPECT_NEAR(grid.mean()[0], 1.0, 1e-12);
  EXPECT_NEAR(grid.mean()[1], 2.25, 1e-12);
  EXPECT_NEAR(grid.histogram(10).sum(), 1.0, 1e-12);
}

TEST(Grid, NoMassIsDomainError) {
  harness::GridBounds b;
  EXPECT_THROW(harness::GridOracle([](const Matrix& z) {
                 return Vector::Constant(z.rows(), -std::numeric_limits<double>::infinity());
               }, b, 10),
               DomainError);
}

// E|X - Np| for X ~ Binomial(N, p), by de Moivre's closed form.
double binomial_mean_abs_deviation(double n, double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  const double k = std::floor(n * p) + 1.0;
  const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                          (n - k + 1.0) * std::log1p(-p);
  return 2.0 * k * std::exp(log_term);
}

TEST(Metrics, DirectOracleDrawsAreClose) {
  const auto oracle = harness::toy_conjugate_oracle();
  Vector x(2);
  x << 0.8, 0.2;
  Rng rng(10);
  const std::size_t draws = 10000;
  const Matrix s = harness::sample_gaussian(oracle.posterior(x), draws, rng);
  const auto m = harness::sample_metrics(s, oracle, x);
  EXPECT_LT(m.mean_err, 0.05);
  EXPECT_NEAR(m.det_ratio, 1.0, 0.1);

  // Sampling-noise floor of the 50 x 50 histogram distance for exact draws.
  const Matrix bins = harness::gaussian_grid(oracle.posterior(x)).histogram();
  double expected_tv = 0.0;
  for (Eigen::Index i = 0; i < bins.size(); ++i) {
    expected_tv += 0.5 * binomial_mean_abs_deviation(static_cast<double>(draws), bins.data()[i]) / draws;
  }
  EXPECT_NEAR(m.hist_tv, expected_tv, 0.15 * expected_tv);
}

TEST(Metrics, PointMassCovarianceErrorIsPosteriorNorm) {
  const auto oracle = harness::toy_conjugate_oracle();
  Vector x(2);
  x << 0.8, 0.2;
  const auto post = oracle.posterior(x);
  const Matrix s = post.mean.transpose().replicate(200, 1);
  const auto m = harness::sample_metrics(s, oracle, x);
  EXPECT_NEAR(m.cov_frob_err, post.covariance.norm(), 1e-12);
  EXPECT_NEAR(m.mean_err, 0.0, 1e-12);
}

TEST(Metrics, TooFewSamplesIsContractError) {
  const auto oracle = harness::toy_conjugate_oracle();
  EXPECT_THROW(harness::sample_metrics(Matrix::Zero(99, 2), oracle, Vector::Zero(2)), ContractError);
}

TEST(Metrics, SampleCovarianceIsUnbiased) {
  Matrix s(3, 2);
  s << 1, 2, 3, 4, 5, 9;
  const Matrix c = harness::sample_covariance(s);
  EXPECT_NEAR(c(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(c(0, 1), 7.0, 1e-12);
  EXPECT_NEAR(c(1, 1), 13.0, 1e-12);
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TEST(Idx, HandBuiltFixture) {
  const fs::path dir = scratch_dir("idx_fixture");
  write_bytes(dir / "img", {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 1, 2, 3, 4, 5, 6, 7});
  const auto images = harness::load_idx_images(dir / "img");
  EXPECT_EQ(images.count, 2u);
  EXPECT_EQ(images.rows, 2u);
  EXPECT_EQ(images.at(1, 1, 0), 6);
  const Matrix m = harness::to_unit_matrix(images);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 4);
  for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(m(k / 4, k % 4), -1.0 + 2.0 * k / 255.0);
}

TEST(Idx, FormatErrors) {
  const fs::path dir = scratch_dir("idx_errors");
  write_bytes(dir / "labels", {0, 0, 8, 1, 0, 0, 0, 2, 3, 4});
  EXPECT_THROW(harness::load_idx_images(dir / "labels"), FormatError);
  EXPECT_EQ(harness::load_idx_labels(dir / "labels"), (std::vector<std::uint8_t>{3, 4}));
  write_bytes(dir / "empty", {});
  EXPECT_THROW(harness::load_idx_images(dir / "empty"), FormatError);
  write_bytes(dir / "short", {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 1, 2});
  EXPECT_THROW(harness::load_idx_images(dir / "short"), FormatError);
  write_bytes(dir / "huge", {0, 0, 8, 3, 255, 255, 255, 255, 255, 255, 255, 255, 255, 255, 255, 255});
  EXPECT_THROW(harness::load_idx_images(dir / "huge"), FormatError);
}

TEST(Idx, RoundTrip) {
  const fs::path dir = scratch_dir("idx_roundtrip");
  std::vector<std::uint8_t> labels;
  const auto images = harness::synthetic_digits(20, 3, &labels);
  harness::write_idx_images(dir / "img", images);
  harness::write_idx_labels(dir / "lab", labels);
  const auto back = harness::load_idx_images(dir / "img");
  EXPECT_EQ(back.count, 20u);
  EXPECT_EQ(back.rows, 28u);
  EXPECT_EQ(back.pixels, images.pixels);
  EXPECT_EQ(harness::load_idx_labels(dir / "lab"), labels);
}

TEST(Synthetic, DigitsAreDeterministicAndVaried) {
  const auto a = harness::synthetic_digits(30, 9);
  const auto b = harness::synthetic_digits(30, 9);
  EXPECT_EQ(a.pixels, b.pixels);
  const Matrix m = harness::to_unit_matrix(a);
  EXPECT_GT(m.maxCoeff(), 0.9);
  EXPECT_DOUBLE_EQ(m.minCoeff(), -1.0);
  EXPECT_GT((m.row(0) - m.row(1)).norm(), 1.0);
}

TEST(Config, ParsesSectionsAndRejectsMistakes) {
  std::istringstream good("[sampler]\nstep_size = 0.001\n[trainer]\nestimator = final_sample\n");
  const auto cfg = harness::parse_config(good);
  EXPECT_DOUBLE_EQ(cfg.sampler.step_size, 0.001);
  EXPECT_EQ(cfg.trainer.estimator, trainers::Estimator::kFinalSample);

  std::istringstream unknown_key("[sampler]\nstepsize = 0.001\n");
  EXPECT_THROW(harness::parse_config(unknown_key), ConfigError);
  std::istringstream unknown_section("[samplers]\nstep_size = 0.001\n");
  EXPECT_THROW(harness::parse_config(unknown_section), ConfigError);
  std::istringstream bad_number("[sampler]\nstep_size = fast\n");
  EXPECT_THROW(harness::parse_config(bad_number), ConfigError);
  std::istringstream negative("[sampler]\nstep_size = -1\n");
  EXPECT_THROW(harness::parse_config(negative).validate(), ConfigError);
}

TEST(Config, MissingInputFileIsConfigError) {
  auto cfg = harness::default_config("train-lae");
  cfg.data.train_images = "/nonexistent/images-idx3-ubyte";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Vi, FullCovarianceRecoversConjugatePosterior) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model();
  Vector x(2);
  x << 0.9, -0.2;
  harness::ViConfig cfg;
  cfg.family = harness::ViFamily::kFull;
  cfg.seed = 3;
  const auto q = harness::fit_gaussian_vi(model, x, cfg);
  const auto post = oracle.posterior(x);
  EXPECT_LT((q.mean - post.mean).norm(), 0.1);
  EXPECT_LT((q.covariance - post.covariance).norm(), 0.1);
}

TEST(Vi, DiagonalUnderestimatesCorrelatedVariance) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model();
  harness::ViConfig cfg;
  cfg.seed = 4;
  const auto q = harness::fit_gaussian_vi(model, Vector::Zero(2), cfg);
  const Matrix sigma = oracle.posterior_covariance();
  EXPECT_EQ(q.covariance(0, 1), 0.0);
  EXPECT_LT(q.covariance.determinant(), sigma.determinant() * 1.05);
  EXPECT_LT(q.covariance(0, 0), sigma(0, 0));
}

TEST(Experiment, ConjugateArtifactsAreReproducible) {
  auto cfg = harness::default_config("conjugate-ald");
  cfg.sampler.total_steps = 400;
  cfg.sampler.burn_in = 100;
  std::ostringstream log;
  cfg.out_dir = scratch_dir("exp_a");
  ASSERT_EQ(harness::run_experiment(cfg, log), 0);
  cfg.out_dir = scratch_dir("exp_b");
  ASSERT_EQ(harness::run_experiment(cfg, log), 0);
  for (const char* name : {"samples.csv", "metrics.csv", "acceptance.txt", "oracle_hist_0.csv"}) {
    const auto a = slurp(fs::temp_directory_path() / "lae_test_exp_a" / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(cfg.out_dir / name)) << name;
  }
  EXPECT_EQ(slurp(cfg.out_dir / "samples.csv").substr(0, 38), "step,datapoint_index,z_0,z_1,accepted\n");
}

TEST(Experiment, TrainThenEvaluateCheckpoint) {
  auto cfg = harness::default_config("train-lae");
  cfg.data.train_count = 200;
  cfg.data.heldout_count = 50;
  cfg.trainer.epochs = 1;
  cfg.trainer.eval_samples = 2;
  cfg.out_dir = scratch_dir("train");
  std::ostringstream log;
  ASSERT_EQ(harness::run_experiment(cfg, log), 0);
  ASSERT_TRUE(fs::exists(cfg.out_dir / "report_lae.csv"));
  ASSERT_TRUE(fs::exists(cfg.out_dir / "checkpoint_lae.bin"));

  auto eval = harness::default_config("eval-elbo");
  eval.data = cfg.data;
  eval.data.checkpoint = (cfg.out_dir / "checkpoint_lae.bin").string();
  eval.trainer.eval_samples = 2;
  std::ostringstream out;
  ASSERT_EQ(harness::run_experiment(eval, out), 0);
  EXPECT_NE(out.str().find("neg_elbo_per_dim"), std::string::npos);

  eval.data.checkpoint = (cfg.out_dir / "missing.bin").string();
  EXPECT_THROW(eval.validate(), ConfigError);
}

TEST(Experiment, UnknownKindIsRejected) {
  auto cfg = harness::default_config("conjugate-ald");
  cfg.kind = "plot";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace lae
