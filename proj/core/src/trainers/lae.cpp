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

#include "lae/trainers/lae.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <optional>

#include "lae/autodiff/ops.hpp"
#include "lae/autodiff/optim.hpp"
#include "lae/common/error.hpp"
#include "lae/samplers/ald.hpp"

namespace lae::trainers {

Estimator parse_estimator(const std::string& name) {
  if (name == "time_averaged" || name == "time-averaged") return Estimator::kTimeAveraged;
  if (name == "final_sample" || name == "final-sample") return Estimator::kFinalSample;
  throw ConfigError("unknown gradient estimator '" + name + "'");
}

const char* estimator_name(Estimator e) {
  return e == Estimator::kTimeAveraged ? "time_averaged" : "final_sample";
}

void LAEConfig::validate() const {
  if (!(learning_rate > 0.0) || !(feature_learning_rate > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(step_size > 0.0)) throw ConfigError("step size must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (eval_samples == 0) throw ConfigError("eval_samples must be positive");
  if (!(eval_sigma > 0.0)) throw ConfigError("eval_sigma must be positive");
  if (optimizer != "sgd" && optimizer != "adam") throw ConfigError("optimizer must be sgd or adam");
}

namespace {

using Clock = std::chrono::steady_clock;

// Independent streams so that methods sharing a seed shuffle, draw
// reparameterization noise and evaluate identically.
struct Streams {
  Rng shuffle, noise, chain;
  std::uint64_t eval_seed;
  explicit Streams(std::uint64_t seed) {
    Rng master(seed);
    shuffle = Rng(master.split());
    noise = Rng(master.split());
    chain = Rng(master.split());
    eval_seed = master.split();
  }
};

std::vector<std::vector<Eigen::Index>> minibatches(Eigen::Index m, std::size_t batch, Rng& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<std::vector<Eigen::Index>> out;
  for (std::size_t s = 0; s < order.size(); s += batch) {
    const std::size_t e = std::min(order.size(), s + batch);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(s), order.begin() + static_cast<std::ptrdiff_t>(e));
  }
  return out;
}

Matrix gather(const Matrix& data, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = data.row(rows[i]);
  return out;
}

ad::Tensor with_regularizer(const models::LatentVariableModel& model, const ad::Tensor& loss, std::size_t batch) {
  ad::Tensor reg = model.likelihood().training_regularizer(batch);
  return reg.defined() ? ad::add(loss, reg) : loss;
}

void check_finite(const ad::Tensor& loss) {
  if (!std::isfinite(loss.item())) throw NumericError("training loss is not finite");
}

struct OptimizerSet {
  std::vector<std::unique_ptr<ad::Optimizer>> parts;
  void add(const std::string& kind, std::vector<ad::NamedTensor> params, double lr) {
    if (!params.empty()) parts.push_back(ad::make_optimizer(kind, std::move(params), lr));
  }
  void zero_grad() {
    for (auto& p : parts) p->zero_grad();
  }
  void step() {
    for (auto& p : parts) p->step();
  }
};

void finish_epoch(TrainReport& report, EpochRecord rec, const LAEConfig& cfg) {
  report.add(rec);
  if (cfg.progress) *cfg.progress << TrainReport::progress_line(report.method(), rec) << std::endl;
}

void fill_eval(EpochRecord& rec, const models::LatentVariableModel& model, const Proposal& proposal,
               const Matrix& heldout, const LAEConfig& cfg, std::uint64_t eval_seed) {
  if (heldout.rows() == 0) {
    rec.neg_elbo_per_dim = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  Rng rng(eval_seed + rec.epoch);
  const ElboEstimate est = evaluate_elbo(model, proposal, heldout, cfg.eval_samples, rng);
  rec.neg_elbo_per_dim = est.neg_elbo_per_dim;
  rec.neg_elbo_stderr = est.stderr_per_dim;
}

}  // namespace

ad::Tensor lae_objective(const models::LatentVariableModel& model, const encoder::AmortizedEncoder& enc,
                         const Matrix& x, std::span<const Matrix> phis, Estimator estimator) {
  if (phis.empty()) throw ContractError("lae_objective needs at least one recorded state");
  ad::Tensor g = enc.features(x);
  auto v_at = [&](const Matrix& phi) {
    ad::Tensor z = encoder::AmortizedEncoder::encode_with(g, ad::Tensor::constant(phi));
    return ad::sum(model.potential(x, z));
  };
  if (estimator == Estimator::kFinalSample) return v_at(phis.back());
  ad::Tensor total = v_at(phis.front());
  for (std::size_t t = 1; t < phis.size(); ++t) total = ad::add(total, v_at(phis[t]));
  return ad::scale(total, 1.0 / static_cast<double>(phis.size()));
}

std::vector<Matrix> ald_inner_loop(const models::LatentVariableModel& model, encoder::AmortizedEncoder& enc,
                                   const Matrix& x, std::size_t steps, double step_size, bool mh,
                                   std::uint64_t seed, samplers::MhStats* stats) {
  Matrix g;
  {
    ad::FreezeGuard freeze(enc.psi_parameters());
    g = enc.features(x).to_matrix();
  }
  samplers::AmortizedTarget target(model, x, std::move(g));
  samplers::SamplerConfig cfg;
  cfg.step_size = step_size;
  cfg.mh_correction = mh;
  samplers::ChainState state = samplers::init_chain(target, samplers::flatten(enc.phi_matrix()), 1.0, seed);
  std::vector<Matrix> phis;
  phis.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    samplers::langevin_step(target, state, cfg);
    phis.push_back(samplers::unflatten(state.position, enc.latent_dim(), enc.feature_dim()));
  }
  if (!phis.empty()) enc.set_phi(phis.back());
  if (stats) *stats += state.stats;
  return phis;
}

TrainReport train_lae(models::LatentVariableModel& model, encoder::AmortizedEncoder& enc,
                      const Matrix& train, const Matrix& heldout, const LAEConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(train.cols()) != model.data_dim() || enc.input_dim() != model.data_dim()) {
    throw DimensionError("training data, encoder and model dimensions disagree");
  }
  const bool autoencoder = cfg.inner_steps == 0;
  if (!autoencoder && cfg.batch_size > enc.feature_dim()) {
    std::cerr << "warning: batch size " << cfg.batch_size << " exceeds feature dimension " << enc.feature_dim()
              << "; Phi g(x) cannot reach every latent configuration of the batch\n";
  }
  Streams streams(cfg.seed);
  OptimizerSet opt;
  opt.add(cfg.optimizer, model.parameters(), cfg.learning_rate);
  opt.add(cfg.optimizer, enc.psi_parameters(), cfg.feature_learning_rate);
  if (autoencoder) opt.add(cfg.optimizer, enc.phi_parameters(), cfg.learning_rate);

  TrainReport report(autoencoder ? "ae" : "lae");
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    samplers::MhStats stats;
    double loss_sum = 0.0;
    for (const auto& rows : minibatches(train.rows(), cfg.batch_size, streams.shuffle)) {
      const Matrix x = gather(train, rows);
      ad::Tensor loss;
      if (autoencoder) {
        ad::Tensor z = enc.encode(x);
        loss = ad::sum(model.potential(x, z));
      } else {
        const auto phis = ald_inner_loop(model, enc, x, cfg.inner_steps, cfg.step_size, cfg.mh_correction,
                                         streams.chain.split(), &stats);
        loss = lae_objective(model, enc, x, phis, cfg.estimator);
      }
      check_finite(loss);
      loss_sum += loss.item();
      loss = with_regularizer(model, loss, rows.size());
      opt.zero_grad();
      loss.backward();
      opt.step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_potential = loss_sum / static_cast<double>(train.rows());
    rec.acceptance_rate = stats.acceptance_rate();
    fill_eval(rec, model, EncoderProposal(enc, cfg.eval_sigma), heldout, cfg, streams.eval_seed);
    rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    finish_epoch(report, rec, cfg);
  }
  return report;
}

namespace {

TrainReport train_variational(models::LatentVariableModel& model, GaussianVariationalEncoder& venc,
                              const Matrix& train, const Matrix& heldout, const LAEConfig& cfg,
                              std::optional<std::size_t> ld_steps) {
  cfg.validate();
  if (static_cast<std::size_t>(train.cols()) != model.data_dim() || venc.input_dim() != model.data_dim()) {
    throw DimensionError("training data, encoder and model dimensions disagree");
  }
  Streams streams(cfg.seed);
  OptimizerSet opt;
  opt.add(cfg.optimizer, model.parameters(), cfg.learning_rate);
  opt.add(cfg.optimizer, venc.parameters(), cfg.feature_learning_rate);
  samplers::SamplerConfig scfg;
  scfg.step_size = cfg.step_size;
  scfg.mh_correction = cfg.mh_correction;

  TrainReport report(ld_steps ? "hoffman-" + std::to_string(*ld_steps) : "vae");
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    samplers::MhStats stats;
    double loss_sum = 0.0;
    for (const auto& rows : minibatches(train.rows(), cfg.batch_size, streams.shuffle)) {
      const Matrix x = gather(train, rows);
      Matrix eps(x.rows(), static_cast<Eigen::Index>(venc.latent_dim()));
      streams.noise.fill_normal(std::span<double>(eps.data(), static_cast<std::size_t>(eps.size())));
      const auto q = venc.forward(x);
      ad::Tensor z0 = GaussianVariationalEncoder::reparameterize(q, eps);

      ad::Tensor loss;
      if (!ld_steps) {
        loss = ad::sum(ad::add(model.potential(x, z0), GaussianVariationalEncoder::log_density(q, z0)));
        check_finite(loss);
        loss_sum += loss.item();
        loss = with_regularizer(model, loss, rows.size());
      } else {
        ad::Tensor encoder_loss;
        {
          ad::FreezeGuard freeze(model.parameters());
          encoder_loss =
              ad::sum(ad::add(model.potential(x, z0), GaussianVariationalEncoder::log_density(q, z0)));
        }
        check_finite(encoder_loss);
        loss_sum += encoder_loss.item();
        Matrix z = z0.to_matrix();
        if (*ld_steps > 0) {
          auto chain = samplers::init_batch_chain(model, x, std::move(z));
          for (std::size_t t = 0; t < *ld_steps; ++t) samplers::ld_batch_step(model, x, chain, scfg, streams.chain);
          stats += chain.stats;
          z = std::move(chain.z);
        }
        ad::Tensor decoder_loss = ad::sum(model.potential(x, ad::Tensor::constant(z)));
        loss = ad::add(encoder_loss, with_regularizer(model, decoder_loss, rows.size()));
      }
      opt.zero_grad();
      loss.backward();
      opt.step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_potential = loss_sum / static_cast<double>(train.rows());
    rec.acceptance_rate = stats.acceptance_rate();
    fill_eval(rec, model, VariationalProposal(venc), heldout, cfg, streams.eval_seed);
    rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    finish_epoch(report, rec, cfg);
  }
  return report;
}

}  // namespace

TrainReport train_vae(models::LatentVariableModel& model, GaussianVariationalEncoder& venc,
                      const Matrix& train, const Matrix& heldout, const LAEConfig& cfg) {
  return train_variational(model, venc, train, heldout, cfg, std::nullopt);
}

TrainReport train_hoffman(models::LatentVariableModel& model, GaussianVariationalEncoder& venc,
                          const Matrix& train, const Matrix& heldout, const LAEConfig& cfg,
                          std::size_t ld_steps) {
  return train_variational(model, venc, train, heldout, cfg, ld_steps);
}

}  // namespace lae::trainers
