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
#include <sstream>

#include "fd.hpp"
#include "lae/common/error.hpp"
#include "lae/harness/checks.hpp"
#include "lae/harness/conjugate_oracle.hpp"
#include "lae/harness/experiments.hpp"
#include "lae/samplers/ald.hpp"
#include "lae/trainers/lae.hpp"

namespace lae {
namespace {

using trainers::LAEConfig;

std::vector<std::vector<double>> snapshot(const std::vector<ad::NamedTensor>& params) {
  std::vector<std::vector<double>> out;
  for (const auto& p : params) out.emplace_back(p.tensor.values().begin(), p.tensor.values().end());
  return out;
}

encoder::AmortizedEncoder small_encoder(std::size_t input_dim, std::size_t latent_dim, Rng& rng) {
  encoder::FeatureConfig fc;
  fc.hidden = 16;
  fc.hidden_layers = 1;
  fc.feature_dim = 32;
  fc.row_norm = 4.0;
  encoder::AmortizedEncoder enc(encoder::make_features(fc, input_dim, rng), latent_dim);
  enc.randomize_phi(0.1, rng);
  return enc;
}

TEST(GradientPaths, AllCasesMatchFiniteDifferences) {
  const auto cases = harness::gradient_checks(harness::kSelftestSeed);
  ASSERT_GE(cases.size(), 7u);
  for (const auto& c : cases) {
    EXPECT_GT(c.parameters, 0u) << c.name;
    EXPECT_LT(c.rel_error, 1e-4) << c.name;
  }
}

TEST(InnerLoop, OnlyPhiMoves) {
  const auto model = harness::toy_conjugate_oracle().make_model(true);
  Rng rng(3);
  auto enc = small_encoder(2, 2, rng);
  const Matrix x = harness::toy_observations(model, 4, rng);
  const auto theta = snapshot(model.parameters());
  const auto psi = snapshot(enc.psi_parameters());
  const Matrix phi0 = enc.phi_matrix();
  samplers::MhStats stats;
  const auto phis = trainers::ald_inner_loop(model, enc, x, 2, 1e-3, true, 9, &stats);
  ASSERT_EQ(phis.size(), 2u);
  EXPECT_EQ(snapshot(model.parameters()), theta);
  EXPECT_EQ(snapshot(enc.psi_parameters()), psi);
  EXPECT_EQ(enc.phi_matrix(), phis.back());
  EXPECT_NE(enc.phi_matrix(), phi0);
  EXPECT_EQ(stats.proposed, 2u);
}

TEST(Objective, EstimatorsAgreeForASingleState) {
  const auto model = harness::toy_conjugate_oracle().make_model(true);
  Rng rng(4);
  auto enc = small_encoder(2, 2, rng);
  const Matrix x = harness::toy_observations(model, 3, rng);
  const std::vector<Matrix> one = {enc.phi_matrix()};
  const double a = trainers::lae_objective(model, enc, x, one, trainers::Estimator::kTimeAveraged).item();
  const double b = trainers::lae_objective(model, enc, x, one, trainers::Estimator::kFinalSample).item();
  EXPECT_DOUBLE_EQ(a, b);

  Matrix other = enc.phi_matrix();
  other.array() += 0.3;
  const std::vector<Matrix> two = {enc.phi_matrix(), other};
  const double avg = trainers::lae_objective(model, enc, x, two, trainers::Estimator::kTimeAveraged).item();
  const double last = trainers::lae_objective(model, enc, x, two, trainers::Estimator::kFinalSample).item();
  const std::vector<Matrix> only_last = {other};
  EXPECT_DOUBLE_EQ(last, trainers::lae_objective(model, enc, x, only_last, trainers::Estimator::kFinalSample).item());
  EXPECT_NEAR(avg, 0.5 * (a + last), 1e-12 * std::abs(avg));
}

TEST(Estimator, ParseNames) {
  EXPECT_EQ(trainers::parse_estimator("time_averaged"), trainers::Estimator::kTimeAveraged);
  EXPECT_EQ(trainers::parse_estimator("final_sample"), trainers::Estimator::kFinalSample);
  EXPECT_STREQ(trainers::estimator_name(trainers::Estimator::kFinalSample), "final_sample");
  EXPECT_THROW(trainers::parse_estimator("mean"), ConfigError);
}

TEST(Config, Validation) {
  LAEConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = LAEConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = LAEConfig{};
  cfg.optimizer = "rmsprop";
  auto model = harness::toy_conjugate_oracle().make_model(true);
  Rng rng(1);
  auto enc = small_encoder(2, 2, rng);
  EXPECT_THROW(trainers::train_lae(model, enc, Matrix::Zero(4, 2), Matrix(), cfg), ConfigError);
}

TEST(Lae, ZeroInnerStepsIsGradientDescentOnPhi) {
  const auto oracle = harness::toy_conjugate_oracle();
  auto model = oracle.make_model();
  Rng rng(6);
  auto enc = small_encoder(2, 2, rng);
  const Matrix x = harness::toy_observations(model, 8, rng);

  ad::Tensor phi = ad::Tensor::parameter(enc.phi_matrix());
  Matrix g;
  {
    ad::FreezeGuard freeze(enc.psi_parameters());
    g = enc.features(x).to_matrix();
  }
  ad::Tensor v = ad::sum(model.potential(x, encoder::AmortizedEncoder::encode_with(ad::Tensor::constant(g), phi)));
  v.backward();
  const double lr = 1e-3;
  const Matrix grad = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      phi.grad().data(), 2, 32);
  const Matrix expected = enc.phi_matrix() - lr * grad;

  LAEConfig cfg;
  cfg.inner_steps = 0;
  cfg.batch_size = 8;
  cfg.epochs = 1;
  cfg.learning_rate = lr;
  cfg.feature_learning_rate = lr;
  cfg.seed = 2;
  const auto report = trainers::train_lae(model, enc, x, Matrix(), cfg);
  EXPECT_EQ(report.method(), "ae");
  EXPECT_EQ(report.rows().front().acceptance_rate, 0.0);
  EXPECT_NEAR(report.rows().front().mean_potential, v.item() / 8.0, 1e-12);
  EXPECT_TRUE(enc.phi_matrix().isApprox(expected, 1e-12));
}

TEST(Lae, LearnsOffsetMaximumLikelihood) {
  const auto oracle = harness::toy_conjugate_oracle();
  auto model = oracle.make_model(true);
  Rng rng(11);
  Matrix x = harness::toy_observations(oracle.make_model(), 1000, rng);
  x.col(0).array() += 0.5;
  x.col(1).array() -= 0.3;
  const Vector mle = oracle.offset_mle(x);

  encoder::FeatureConfig fc;
  fc.hidden = 64;
  fc.hidden_layers = 1;
  fc.feature_dim = 128;
  encoder::AmortizedEncoder enc(encoder::make_features(fc, 2, rng), 2);
  LAEConfig cfg;
  cfg.inner_steps = 2;
  cfg.batch_size = 100;
  cfg.epochs = 30;
  cfg.step_size = 4e-4;
  cfg.learning_rate = 1e-3;
  cfg.feature_learning_rate = 1e-3;
  cfg.seed = 5;
  trainers::train_lae(model, enc, x, Matrix(), cfg);
  const auto values = model.parameters().front().tensor.values();
  const Vector learned = Eigen::Map<const Vector>(values.data(), 2);
  EXPECT_LT((learned - mle).norm(), 0.05) << learned.transpose() << " vs " << mle.transpose();
}

TEST(Lae, DeterministicReports) {
  auto run = [] {
    const auto oracle = harness::toy_conjugate_oracle();
    auto model = oracle.make_model(true);
    Rng rng(12);
    auto enc = small_encoder(2, 2, rng);
    const Matrix x = harness::toy_observations(model, 60, rng);
    LAEConfig cfg;
    cfg.batch_size = 20;
    cfg.epochs = 3;
    cfg.step_size = 1e-3;
    cfg.seed = 8;
    auto report = trainers::train_lae(model, enc, x, x.topRows(10), cfg);
    std::ostringstream os;
    for (const auto& r : report.rows()) os << r.mean_potential << ' ' << r.neg_elbo_per_dim << ' ' << r.acceptance_rate << '\n';
    return os.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(Lae, NonFiniteDataAbortsRun) {
  auto model = harness::toy_conjugate_oracle().make_model(true);
  Rng rng(2);
  auto enc = small_encoder(2, 2, rng);
  Matrix x = Matrix::Zero(4, 2);
  x(1, 0) = std::nan("");
  LAEConfig cfg;
  cfg.batch_size = 4;
  cfg.epochs = 1;
  EXPECT_THROW(trainers::train_lae(model, enc, x, Matrix(), cfg), Error);
}

trainers::GaussianVariationalEncoder small_venc(Rng& rng) {
  ad::MlpSpec spec;
  spec.sizes = {2, 16};
  return trainers::GaussianVariationalEncoder(spec, 2, rng);
}

TEST(Hoffman, ZeroStepsMatchesVae) {
  const auto oracle = harness::toy_conjugate_oracle();
  Rng data_rng(3);
  const Matrix x = harness::toy_observations(oracle.make_model(), 200, data_rng);
  LAEConfig cfg;
  cfg.batch_size = 50;
  cfg.epochs = 4;
  cfg.seed = 17;
  auto run = [&](bool hoffman) {
    auto model = oracle.make_model(true);
    Rng rng(5);
    auto venc = small_venc(rng);
    return hoffman ? trainers::train_hoffman(model, venc, x, x.topRows(50), cfg, 0)
                   : trainers::train_vae(model, venc, x, x.topRows(50), cfg);
  };
  const auto vae = run(false);
  const auto hof = run(true);
  ASSERT_EQ(vae.rows().size(), hof.rows().size());
  for (std::size_t e = 0; e < vae.rows().size(); ++e) {
    EXPECT_NEAR(vae.rows()[e].mean_potential, hof.rows()[e].mean_potential, 1e-9);
    EXPECT_NEAR(vae.rows()[e].neg_elbo_per_dim, hof.rows()[e].neg_elbo_per_dim, 1e-9);
  }
  EXPECT_EQ(hof.method(), "hoffman-0");
}

TEST(Hoffman, RefinementLowersMeanPotential) {
  const auto oracle = harness::toy_conjugate_oracle();
  const auto model = oracle.make_model();
  Rng rng(21);
  const Matrix x = harness::toy_observations(model, 200, rng);
  Matrix z0(200, 2);
  for (Eigen::Index i = 0; i < 200; ++i) z0.row(i) = model.prior().sample(rng).transpose();
  auto chain = samplers::init_batch_chain(model, x, z0);
  const double before = chain.potential.mean();
  samplers::SamplerConfig cfg;
  cfg.step_size = 0.01;
  for (int t = 0; t < 10; ++t) samplers::ld_batch_step(model, x, chain, cfg, rng);
  EXPECT_LT(chain.potential.mean(), before);
}

TEST(Hoffman, SweepCompletes) {
  const auto oracle = harness::toy_conjugate_oracle();
  Rng data_rng(3);
  const Matrix x = harness::toy_observations(oracle.make_model(), 100, data_rng);
  LAEConfig cfg;
  cfg.batch_size = 50;
  cfg.epochs = 2;
  cfg.step_size = 1e-3;
  for (std::size_t steps : {2u, 10u}) {
    auto model = oracle.make_model(true);
    Rng rng(5);
    auto venc = small_venc(rng);
    const auto report = trainers::train_hoffman(model, venc, x, x.topRows(20), cfg, steps);
    EXPECT_EQ(report.rows().size(), 2u);
    EXPECT_GT(report.rows().back().acceptance_rate, 0.5);
    EXPECT_TRUE(std::isfinite(report.rows().back().neg_elbo_per_dim));
  }
}

TEST(Kl, ClosedFormMatchesMonteCarlo) {
  Matrix mean(1, 3), logvar(1, 3);
  mean << 0.5, -1.0, 0.2;
  logvar << -0.4, 0.3, -1.5;
  const double exact = trainers::gaussian_kl_standard(mean, logvar)[0];
  double by_hand = 0.0;
  for (int k = 0; k < 3; ++k) {
    by_hand += 0.5 * (mean(0, k) * mean(0, k) + std::exp(logvar(0, k)) - logvar(0, k) - 1.0);
  }
  EXPECT_NEAR(exact, by_hand, 1e-14);

  const std::size_t draws = 10000;
  Rng rng(8);
  Matrix eps(static_cast<Eigen::Index>(draws), 3);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = rng.normal();
  ad::Tensor mu = ad::Tensor::parameter(Matrix(mean.replicate(static_cast<Eigen::Index>(draws), 1)));
  ad::Tensor lv = ad::Tensor::parameter(Matrix(logvar.replicate(static_cast<Eigen::Index>(draws), 1)));
  const trainers::GaussianVariationalEncoder::Output q{mu, lv};
  ad::Tensor z = trainers::GaussianVariationalEncoder::reparameterize(q, eps);
  const models::GaussianPrior prior = models::GaussianPrior::standard(3);
  ad::Tensor log_p = models::gaussian_log_density_rows(z, prior.factor());
  ad::Tensor kl = ad::scale(ad::sum(ad::sub(trainers::GaussianVariationalEncoder::log_density(q, z), log_p)),
                            1.0 / static_cast<double>(draws));
  EXPECT_NEAR(kl.item() / exact, 1.0, 0.02);

  // d KL / d mu = mu, d KL / d logvar = (exp(logvar) - 1) / 2.
  kl.backward();
  for (int k = 0; k < 3; ++k) {
    double gm = 0.0, gl = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      gm += mu.grad()[i * 3 + static_cast<std::size_t>(k)];
      gl += lv.grad()[i * 3 + static_cast<std::size_t>(k)];
    }
    EXPECT_NEAR(gm, mean(0, k), 0.05);
    EXPECT_NEAR(gl, 0.5 * (std::exp(logvar(0, k)) - 1.0), 0.05);
  }
}

struct ElboFixture {
  harness::ConjugateOracle oracle = harness::toy_conjugate_oracle();
  models::LatentVariableModel model = oracle.make_model();
  Matrix x;
  double exact = 0.0;

  ElboFixture() {
    Rng rng(30);
    x = harness::toy_observations(model, 400, rng);
    for (Eigen::Index i = 0; i < x.rows(); ++i) exact -= oracle.log_marginal(x.row(i).transpose());
    exact /= static_cast<double>(x.rows()) * 2.0;
  }

  trainers::FunctionProposal posterior() const {
    return trainers::FunctionProposal([this](const Matrix& batch) {
      trainers::GaussianBatch out;
      out.mean.resize(batch.rows(), 2);
      for (Eigen::Index i = 0; i < batch.rows(); ++i) {
        out.mean.row(i) = oracle.posterior(batch.row(i).transpose()).mean.transpose();
      }
      out.covariance.emplace(oracle.posterior_covariance());
      return out;
    });
  }
};

TEST(Elbo, TightAtExactPosterior) {
  ElboFixture f;
  Rng rng(1);
  const auto est = trainers::evaluate_elbo(f.model, f.posterior(), f.x, 16, rng);
  EXPECT_EQ(est.evaluated, 400u * 16u);
  EXPECT_LE(std::abs(est.neg_elbo_per_dim - f.exact), 3.0 * est.stderr_per_dim + 1e-12);
  // log p(x, z) - log q(z) equals log p(x) for every draw.
  EXPECT_NEAR(est.neg_elbo_per_dim, f.exact, 1e-10);
}

TEST(Elbo, LowerBoundForAnyEncoder) {
  ElboFixture f;
  Rng rng(2);
  for (double sigma : {0.05, 0.5, 2.0}) {
    auto enc = small_encoder(2, 2, rng);
    const auto est = trainers::evaluate_elbo(f.model, trainers::EncoderProposal(enc, sigma), f.x, 16, rng);
    EXPECT_GE(est.neg_elbo_per_dim + 3.0 * est.stderr_per_dim, f.exact) << sigma;
  }
}

TEST(Elbo, SampleCountsAgree) {
  ElboFixture f;
  Rng rng(3);
  auto enc = small_encoder(2, 2, rng);
  trainers::EncoderProposal q(enc, 0.5);
  const auto one = trainers::evaluate_elbo(f.model, q, f.x, 1, rng);
  const auto hundred = trainers::evaluate_elbo(f.model, q, f.x, 100, rng);
  const double combined = std::hypot(one.stderr_per_dim, hundred.stderr_per_dim);
  EXPECT_LT(std::abs(one.neg_elbo_per_dim - hundred.neg_elbo_per_dim), 3.0 * combined);
}

TEST(Elbo, NarrowProposalIsFlagged) {
  ElboFixture f;
  Rng rng(4);
  auto enc = small_encoder(2, 2, rng);
  const auto est = trainers::evaluate_elbo(f.model, trainers::EncoderProposal(enc, 1e-5), f.x, 4, rng);
  EXPECT_TRUE(est.degenerate_proposal);
  const auto ok = trainers::evaluate_elbo(f.model, trainers::EncoderProposal(enc, 0.05), f.x, 4, rng);
  EXPECT_FALSE(ok.degenerate_proposal);
}

TEST(Elbo, ZeroSamplesIsContractViolation) {
  ElboFixture f;
  Rng rng(4);
  auto enc = small_encoder(2, 2, rng);
  EXPECT_THROW(trainers::evaluate_elbo(f.model, trainers::EncoderProposal(enc, 0.05), f.x, 0, rng), Error);
}

TEST(Report, EpochsMustBeConsecutive) {
  trainers::TrainReport report("lae");
  trainers::EpochRecord r;
  r.epoch = 1;
  report.add(r);
  r.epoch = 3;
  EXPECT_THROW(report.add(r), ContractError);
  std::ostringstream os;
  report.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "method,epoch,mean_potential,neg_elbo_per_dim,neg_elbo_stderr,acceptance_rate,seconds");
}

}  // namespace
}  // namespace lae
