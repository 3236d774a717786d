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

#include "lae/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "lae/common/error.hpp"
#include "lae/harness/idx.hpp"
#include "lae/harness/synthetic.hpp"
#include "lae/harness/vi.hpp"
#include "lae/models/checkpoint.hpp"
#include "lae/samplers/ald.hpp"

namespace lae::harness {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw FormatError("cannot write " + (dir / name).string());
  return os;
}

ConjugateOracle oracle_from(const ExperimentConfig& cfg) {
  const auto& c = cfg.model.obs_cov;
  Matrix obs(2, 2);
  obs << c[0], c[1], c[2], c[3];
  return ConjugateOracle(Vector::Zero(2), Matrix::Identity(2, 2), obs);
}

// Seeds of the independent streams of a toy experiment, drawn in a fixed order.
struct ToySeeds {
  std::uint64_t model, data, encoder, sampler, vi;
  explicit ToySeeds(std::uint64_t seed) {
    Rng master(seed);
    model = master.split();
    data = master.split();
    encoder = master.split();
    sampler = master.split();
    vi = master.split();
  }
};

samplers::SamplerConfig sampler_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  samplers::SamplerConfig s = cfg.sampler;
  s.seed = seed;
  return s;
}

PosteriorRun ald_on(const models::LatentVariableModel& model, const Matrix& x, const ExperimentConfig& cfg,
                    const ToySeeds& seeds) {
  Rng enc_rng(seeds.encoder);
  encoder::AmortizedEncoder enc = build_encoder(cfg, x.cols(), enc_rng);
  const auto t0 = Clock::now();
  PosteriorRun run;
  run.x = x;
  run.feature_dim = enc.feature_dim();
  {
    ad::FreezeGuard freeze(enc.psi_parameters());
    run.rank = encoder::rank_diagnostic(enc.features(x).to_matrix());
  }
  run.store = samplers::run_ald(model, x, enc, sampler_config(cfg, seeds.sampler));
  run.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

void conjugate_metrics(PosteriorRun& run, const ConjugateOracle& oracle) {
  run.metrics.clear();
  for (std::size_t i = 0; i < run.store.datapoints(); ++i) {
    run.metrics.push_back(sample_metrics(run.store.samples(i), oracle, run.x.row(static_cast<Eigen::Index>(i)).transpose()));
  }
}

void write_metrics(const std::filesystem::path& dir, const std::string& name, const PosteriorRun& run,
                   const ConjugateOracle& oracle) {
  auto os = open_out(dir, name);
  os << "datapoint,x_0,x_1,post_mean_0,post_mean_1,mean_err,cov_frob_err,det_ratio,hist_tv\n";
  for (std::size_t i = 0; i < run.metrics.size(); ++i) {
    const Vector x = run.x.row(static_cast<Eigen::Index>(i)).transpose();
    const auto post = oracle.posterior(x);
    const auto& m = run.metrics[i];
    os << i << ',' << num(x[0]) << ',' << num(x[1]) << ',' << num(post.mean[0]) << ',' << num(post.mean[1]) << ','
       << num(m.mean_err) << ',' << num(m.cov_frob_err) << ',' << num(m.det_ratio) << ',' << num(m.hist_tv)
       << '\n';
  }
}

void write_histogram(const std::filesystem::path& dir, const std::string& name, const GridOracle& oracle) {
  auto os = open_out(dir, name);
  const Matrix h = oracle.histogram();
  const auto& b = oracle.bounds();
  os << "bin_0,bin_1,z_0,z_1,mass\n";
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      const double z0 = b.lo[0] + (static_cast<double>(i) + 0.5) * (b.hi[0] - b.lo[0]) / static_cast<double>(h.rows());
      const double z1 = b.lo[1] + (static_cast<double>(j) + 0.5) * (b.hi[1] - b.lo[1]) / static_cast<double>(h.cols());
      os << i << ',' << j << ',' << num(z0) << ',' << num(z1) << ',' << num(h(i, j)) << '\n';
    }
  }
}

void write_samples(const std::filesystem::path& dir, const std::string& name, const Matrix& s) {
  auto os = open_out(dir, name);
  os << "z_0,z_1\n";
  for (Eigen::Index t = 0; t < s.rows(); ++t) os << num(s(t, 0)) << ',' << num(s(t, 1)) << '\n';
}

ad::MlpSpec image_decoder_spec(const ExperimentConfig& cfg, std::size_t data_dim) {
  ad::MlpSpec spec;
  spec.sizes.push_back(cfg.model.latent_dim);
  for (std::size_t i = 0; i + 1 < cfg.model.decoder_layers; ++i) spec.sizes.push_back(cfg.model.decoder_hidden);
  spec.sizes.push_back(data_dim);
  spec.hidden_activation = ad::Activation::kRelu;
  spec.layer_norm = cfg.model.layer_norm;
  spec.init = ad::InitSpec{ad::InitSpec::Kind::kHe, 1.0, 0.0};
  return spec;
}

}  // namespace

Matrix toy_observations(const models::LatentVariableModel& model, std::size_t n, Rng& rng) {
  Matrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(model.latent_dim()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) z.row(i) = model.prior().sample(rng).transpose();
  ad::FreezeGuard freeze(model.parameters());
  return model.likelihood().sample(z, rng);
}

models::LatentVariableModel build_model(const ExperimentConfig& cfg, Rng& rng, std::size_t data_dim,
                                        std::size_t training_size) {
  const auto& m = cfg.model;
  if (m.kind == "conjugate") return oracle_from(cfg).make_model();
  if (m.kind == "neural-toy") {
    if (m.decoder_layers < 2) throw ConfigError("neural toy decoder needs at least two layers");
    ad::MlpSpec spec;
    spec.sizes.push_back(m.latent_dim);
    for (std::size_t i = 0; i + 1 < m.decoder_layers; ++i) spec.sizes.push_back(m.decoder_hidden);
    spec.sizes.push_back(2);
    spec.hidden_activation = ad::Activation::kRelu;
    spec.init = ad::InitSpec{ad::InitSpec::Kind::kNormal, m.decoder_weight_std, m.decoder_bias_std};
    return models::LatentVariableModel(
        models::GaussianPrior::standard(m.latent_dim),
        std::make_unique<models::NeuralGaussianLikelihood>(ad::Mlp(spec, rng), m.sigma_x));
  }
  if (m.decoder_layers < 2) throw ConfigError("image decoder needs at least two layers");
  return models::LatentVariableModel(
      models::GaussianPrior::standard(m.latent_dim),
      std::make_unique<models::DiscretizedLogisticLikelihood>(ad::Mlp(image_decoder_spec(cfg, data_dim), rng),
                                                              m.initial_scale_pre, training_size));
}

encoder::AmortizedEncoder build_encoder(const ExperimentConfig& cfg, std::size_t input_dim, Rng& rng) {
  encoder::AmortizedEncoder enc(encoder::make_features(cfg.features, input_dim, rng), cfg.model.latent_dim);
  if (cfg.phi_init_std > 0.0) enc.randomize_phi(cfg.phi_init_std, rng);
  return enc;
}

trainers::GaussianVariationalEncoder build_variational_encoder(const ExperimentConfig& cfg, std::size_t input_dim,
                                                               Rng& rng) {
  ad::MlpSpec spec;
  spec.sizes = {input_dim};
  for (std::size_t i = 0; i < std::max<std::size_t>(1, cfg.features.hidden_layers); ++i) spec.sizes.push_back(cfg.venc_hidden);
  spec.hidden_activation = ad::Activation::kRelu;
  spec.layer_norm = cfg.features.layer_norm;
  spec.init = ad::InitSpec{ad::InitSpec::Kind::kHe, 1.0, 0.0};
  return trainers::GaussianVariationalEncoder(spec, cfg.model.latent_dim, rng);
}

PosteriorRun run_conjugate_ald(const ExperimentConfig& cfg) {
  const ConjugateOracle oracle = oracle_from(cfg);
  const auto model = oracle.make_model();
  const ToySeeds seeds(cfg.seed);
  Rng data_rng(seeds.data);
  const Matrix x = toy_observations(model, cfg.data.datapoints, data_rng);
  PosteriorRun run = ald_on(model, x, cfg, seeds);
  conjugate_metrics(run, oracle);
  return run;
}

PosteriorRun run_conjugate_ld(const ExperimentConfig& cfg) {
  const ConjugateOracle oracle = oracle_from(cfg);
  const auto model = oracle.make_model();
  const ToySeeds seeds(cfg.seed);
  Rng data_rng(seeds.data);
  PosteriorRun run;
  run.x = toy_observations(model, cfg.data.datapoints, data_rng);
  Rng seed_rng(seeds.sampler);
  std::vector<samplers::SampleStore> parts;
  const auto t0 = Clock::now();
  for (Eigen::Index i = 0; i < run.x.rows(); ++i) {
    parts.push_back(samplers::run_ld(model, run.x.row(i).transpose(), sampler_config(cfg, seed_rng.split()),
                                     Vector::Zero(2)));
  }
  run.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  run.store = samplers::SampleStore::merge(parts);
  conjugate_metrics(run, oracle);
  return run;
}

AblationResult run_capacity_ablation(const ExperimentConfig& cfg) {
  const ConjugateOracle oracle = oracle_from(cfg);
  const auto model = oracle.make_model();
  const ToySeeds seeds(cfg.seed);
  Rng data_rng(seeds.data);
  const Matrix x = toy_observations(model, cfg.data.datapoints, data_rng);
  AblationResult out;
  for (std::size_t d : cfg.ablation_dims) {
    ExperimentConfig c = cfg;
    c.features.feature_dim = d;
    PosteriorRun run = ald_on(model, x, c, seeds);
    conjugate_metrics(run, oracle);
    AblationRow row;
    row.feature_dim = d;
    row.rank = run.rank.rank;
    row.acceptance_rate = run.store.stats().acceptance_rate();
    row.min_det_ratio = std::numeric_limits<double>::infinity();
    for (const auto& m : run.metrics) {
      row.max_mean_err = std::max(row.max_mean_err, m.mean_err);
      row.max_cov_frob_err = std::max(row.max_cov_frob_err, m.cov_frob_err);
      row.min_det_ratio = std::min(row.min_det_ratio, m.det_ratio);
      row.max_det_ratio = std::max(row.max_det_ratio, m.det_ratio);
    }
    out.rows.push_back(row);
    out.runs.push_back(std::move(run));
  }
  return out;
}

NeuralPosteriorResult run_neural_posterior(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.model.kind = "neural-toy";
  const ToySeeds seeds(cfg.seed);
  Rng model_rng(seeds.model), data_rng(seeds.data);
  const auto model = build_model(c, model_rng);
  NeuralPosteriorResult out;
  out.x = toy_observations(model, cfg.data.datapoints, data_rng);
  PosteriorRun run = ald_on(model, out.x, c, seeds);
  out.store = run.store;
  Rng vi_rng(seeds.vi);
  GridBounds box{{-kNeuralGridHalfWidth, -kNeuralGridHalfWidth}, {kNeuralGridHalfWidth, kNeuralGridHalfWidth}};
  for (Eigen::Index i = 0; i < out.x.rows(); ++i) {
    const Vector x = out.x.row(i).transpose();
    const GridOracle oracle = build_grid_oracle(model, x, box);
    out.oracle_histograms.push_back(oracle.histogram());
    const Matrix ald = out.store.samples(static_cast<std::size_t>(i));
    NeuralPosteriorPoint p;
    p.ald = sample_metrics(ald, oracle);
    for (ViFamily family : {ViFamily::kDiagonal, ViFamily::kFull}) {
      ViConfig vc;
      vc.family = family;
      vc.iterations = cfg.vi_iterations;
      vc.samples = cfg.vi_samples;
      vc.learning_rate = cfg.vi_learning_rate;
      vc.seed = vi_rng.split();
      const GaussianMoments fit = fit_gaussian_vi(model, x, vc);
      Matrix draws = sample_gaussian(fit, static_cast<std::size_t>(ald.rows()), vi_rng);
      if (family == ViFamily::kDiagonal) {
        p.diagonal_vi = sample_metrics(draws, oracle);
        out.diagonal_vi_samples.push_back(std::move(draws));
      } else {
        p.full_vi = sample_metrics(draws, oracle);
        out.full_vi_samples.push_back(std::move(draws));
      }
    }
    out.ald_tv += p.ald.hist_tv;
    out.diagonal_vi_tv += p.diagonal_vi.hist_tv;
    out.full_vi_tv += p.full_vi.hist_tv;
    out.points.push_back(p);
  }
  const double n = static_cast<double>(out.points.size());
  out.ald_tv /= n;
  out.diagonal_vi_tv /= n;
  out.full_vi_tv /= n;
  return out;
}

ImageData load_image_data(const ExperimentConfig& cfg) {
  ImageData data;
  if (cfg.data.train_images.empty()) {
    const IdxImages all = synthetic_digits(cfg.data.train_count + cfg.data.heldout_count, cfg.data.seed);
    data.train = to_unit_matrix(all, 0, cfg.data.train_count);
    data.heldout = to_unit_matrix(all, cfg.data.train_count, cfg.data.heldout_count);
    return data;
  }
  const IdxImages train = load_idx_images(cfg.data.train_images);
  if (train.count < cfg.data.train_count) throw ConfigError("training file has fewer images than train_count");
  data.train = to_unit_matrix(train, 0, cfg.data.train_count);
  if (!cfg.data.heldout_images.empty()) {
    data.heldout = to_unit_matrix(load_idx_images(cfg.data.heldout_images), 0, cfg.data.heldout_count);
  } else {
    data.heldout = to_unit_matrix(train, cfg.data.train_count, cfg.data.heldout_count);
  }
  return data;
}

trainers::TrainReport run_image_training(const ExperimentConfig& cfg, const ImageData& data, const std::string& method,
                                         std::size_t ld_steps, std::vector<ad::NamedTensor>* checkpoint) {
  Rng master(cfg.seed);
  Rng model_rng(master.split()), enc_rng(master.split());
  trainers::LAEConfig tc = cfg.trainer;
  tc.seed = master.split();
  const auto d_x = static_cast<std::size_t>(data.train.cols());
  auto model = build_model(cfg, model_rng, d_x, static_cast<std::size_t>(data.train.rows()));
  if (method == "lae" || method == "ae") {
    if (method == "ae") tc.inner_steps = 0;
    auto enc = build_encoder(cfg, d_x, enc_rng);
    auto report = trainers::train_lae(model, enc, data.train, data.heldout, tc);
    if (checkpoint) {
      *checkpoint = model.parameters();
      for (auto& p : enc.parameters()) checkpoint->push_back(p);
    }
    return report;
  }
  if (method == "vae" || method == "hoffman") {
    auto venc = build_variational_encoder(cfg, d_x, enc_rng);
    auto report = method == "vae" ? trainers::train_vae(model, venc, data.train, data.heldout, tc)
                                  : trainers::train_hoffman(model, venc, data.train, data.heldout, tc, ld_steps);
    if (checkpoint) {
      *checkpoint = model.parameters();
      for (auto& p : venc.parameters()) checkpoint->push_back(p);
    }
    return report;
  }
  throw ConfigError("unknown training method '" + method + "'");
}

trainers::ElboEstimate run_checkpoint_elbo(const ExperimentConfig& cfg, const ImageData& data) {
  const auto records = models::load_checkpoint(cfg.data.checkpoint);
  const bool amortized = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.name == "encoder.phi"; });
  Rng master(cfg.seed);
  Rng model_rng(master.split()), enc_rng(master.split());
  const auto d_x = static_cast<std::size_t>(data.heldout.cols());
  auto model = build_model(cfg, model_rng, d_x, static_cast<std::size_t>(std::max<Eigen::Index>(1, data.train.rows())));
  Rng eval_rng(master.split());
  if (amortized) {
    auto enc = build_encoder(cfg, d_x, enc_rng);
    auto params = model.parameters();
    for (auto& p : enc.parameters()) params.push_back(p);
    models::restore_checkpoint(cfg.data.checkpoint, params);
    const trainers::EncoderProposal q(enc, cfg.trainer.eval_sigma);
    return trainers::evaluate_elbo(model, q, data.heldout, cfg.trainer.eval_samples, eval_rng);
  }
  auto venc = build_variational_encoder(cfg, d_x, enc_rng);
  auto params = model.parameters();
  for (auto& p : venc.parameters()) params.push_back(p);
  models::restore_checkpoint(cfg.data.checkpoint, params);
  const trainers::VariationalProposal q(venc);
  return trainers::evaluate_elbo(model, q, data.heldout, cfg.trainer.eval_samples, eval_rng);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto& out = cfg.out_dir;
  const bool write = !out.empty();
  if (write) std::filesystem::create_directories(out);
  char line[256];

  if (cfg.kind == "conjugate-ald" || cfg.kind == "sample-ld") {
    const bool ald = cfg.kind == "conjugate-ald";
    const PosteriorRun run = ald ? run_conjugate_ald(cfg) : run_conjugate_ld(cfg);
    const ConjugateOracle oracle = oracle_from(cfg);
    for (std::size_t i = 0; i < run.metrics.size(); ++i) {
      const auto& m = run.metrics[i];
      std::snprintf(line, sizeof line, "datapoint %zu: mean_err %.4f  cov_frob_err %.4f  det_ratio %.3f  hist_tv %.3f", i,
                    m.mean_err, m.cov_frob_err, m.det_ratio, m.hist_tv);
      log << line << '\n';
    }
    std::snprintf(line, sizeof line, "acceptance %.4f  seconds %.2f", run.store.stats().acceptance_rate(), run.seconds);
    log << line << '\n';
    if (ald) log << "feature rank " << run.rank.rank << " of " << run.x.rows() << " datapoints\n";
    if (write) {
      run.store.write_csv(out / "samples.csv");
      write_metrics(out, "metrics.csv", run, oracle);
      auto report = open_out(out, "acceptance.txt");
      run.store.write_report(report);
      for (Eigen::Index i = 0; i < run.x.rows(); ++i) {
        write_histogram(out, "oracle_hist_" + std::to_string(i) + ".csv",
                        gaussian_grid(oracle.posterior(run.x.row(i).transpose())));
      }
    }
    return 0;
  }

  if (cfg.kind == "capacity-ablation") {
    const AblationResult res = run_capacity_ablation(cfg);
    const std::size_t n = cfg.data.datapoints;
    log << "d,n,rank,max_mean_err,max_cov_frob_err,min_det_ratio,max_det_ratio,acceptance\n";
    for (const auto& r : res.rows) {
      std::snprintf(line, sizeof line, "%zu,%zu,%zu,%.4f,%.4f,%.3f,%.3f,%.4f", r.feature_dim, n, r.rank, r.max_mean_err,
                    r.max_cov_frob_err, r.min_det_ratio, r.max_det_ratio, r.acceptance_rate);
      log << line << '\n';
    }
    if (write) {
      auto os = open_out(out, "ablation.csv");
      os << "d,n,rank,max_mean_err,max_cov_frob_err,min_det_ratio,max_det_ratio,acceptance\n";
      for (const auto& r : res.rows) {
        os << r.feature_dim << ',' << n << ',' << r.rank << ',' << num(r.max_mean_err) << ','
           << num(r.max_cov_frob_err) << ',' << num(r.min_det_ratio) << ',' << num(r.max_det_ratio) << ','
           << num(r.acceptance_rate) << '\n';
      }
      const ConjugateOracle oracle = oracle_from(cfg);
      for (const auto& run : res.runs) {
        const std::string tag = "d" + std::to_string(run.feature_dim);
        run.store.write_csv(out / ("samples_" + tag + ".csv"));
        write_metrics(out, "metrics_" + tag + ".csv", run, oracle);
      }
    }
    return 0;
  }

  if (cfg.kind == "neural-posterior") {
    const NeuralPosteriorResult res = run_neural_posterior(cfg);
    for (std::size_t i = 0; i < res.points.size(); ++i) {
      const auto& p = res.points[i];
      std::snprintf(line, sizeof line, "datapoint %zu: hist_tv ald %.3f  diag-vi %.3f  full-vi %.3f", i, p.ald.hist_tv,
                    p.diagonal_vi.hist_tv, p.full_vi.hist_tv);
      log << line << '\n';
    }
    std::snprintf(line, sizeof line, "mean hist_tv ald %.3f  diag-vi %.3f  full-vi %.3f  acceptance %.4f", res.ald_tv,
                  res.diagonal_vi_tv, res.full_vi_tv, res.store.stats().acceptance_rate());
    log << line << '\n';
    if (write) {
      res.store.write_csv(out / "samples.csv");
      auto os = open_out(out, "metrics.csv");
      os << "datapoint,method,mean_err,cov_frob_err,hist_tv\n";
      for (std::size_t i = 0; i < res.points.size(); ++i) {
        const auto& p = res.points[i];
        for (const auto& [name, m] : {std::pair{"ald", p.ald}, std::pair{"diagonal-vi", p.diagonal_vi},
                                      std::pair{"full-vi", p.full_vi}}) {
          os << i << ',' << name << ',' << num(m.mean_err) << ',' << num(m.cov_frob_err) << ',' << num(m.hist_tv) << '\n';
        }
        write_samples(out, "diagonal_vi_" + std::to_string(i) + ".csv", res.diagonal_vi_samples[i]);
        write_samples(out, "full_vi_" + std::to_string(i) + ".csv", res.full_vi_samples[i]);
      }
      const ToySeeds seeds(cfg.seed);
      Rng model_rng(seeds.model);
      ExperimentConfig c = cfg;
      c.model.kind = "neural-toy";
      const auto model = build_model(c, model_rng);
      GridBounds box{{-kNeuralGridHalfWidth, -kNeuralGridHalfWidth}, {kNeuralGridHalfWidth, kNeuralGridHalfWidth}};
      for (Eigen::Index i = 0; i < res.x.rows(); ++i) {
        write_histogram(out, "oracle_hist_" + std::to_string(i) + ".csv",
                        build_grid_oracle(model, res.x.row(i).transpose(), box));
      }
    }
    return 0;
  }

  const ImageData data = load_image_data(cfg);
  if (cfg.kind == "eval-elbo") {
    const auto est = run_checkpoint_elbo(cfg, data);
    if (est.degenerate_proposal) log << "warning: proposal sigma below " << trainers::kMinProposalSigma << '\n';
    std::snprintf(line, sizeof line, "neg_elbo_per_dim %.6f +- %.6f (sigma %.4g, K %zu, skipped %zu)",
                  est.neg_elbo_per_dim, est.stderr_per_dim, cfg.trainer.eval_sigma, cfg.trainer.eval_samples,
                  est.skipped);
    log << line << '\n';
    return 0;
  }

  std::vector<std::pair<std::string, std::size_t>> runs;
  if (cfg.kind == "train-lae") runs.emplace_back("lae", 0);
  if (cfg.kind == "train-ae") runs.emplace_back("ae", 0);
  if (cfg.kind == "train-vae") runs.emplace_back("vae", 0);
  if (cfg.kind == "train-hoffman") {
    for (std::size_t s : cfg.ld_steps) runs.emplace_back("hoffman", s);
  }
  ExperimentConfig c = cfg;
  c.trainer.progress = &log;
  for (const auto& [method, steps] : runs) {
    std::vector<ad::NamedTensor> params;
    const auto report = run_image_training(c, data, method, steps, &params);
    if (write) {
      const std::string tag = method == "hoffman" ? "hoffman_" + std::to_string(steps) : method;
      report.write_csv(out / ("report_" + tag + ".csv"));
      models::save_checkpoint(out / ("checkpoint_" + tag + ".bin"), params);
    }
  }
  return 0;
}

}  // namespace lae::harness
