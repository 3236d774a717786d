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

#include "lae/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"
#include "lae/samplers/ald.hpp"

namespace lae::harness {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

models::LatentVariableModel conjugate_model() { return toy_conjugate_oracle().make_model(); }

double relative_error(const Vector& a, const Vector& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

double fd_step(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

// Reverse-mode gradient of a Target against central differences of its value.
GradientCase check_target(const std::string& name, const samplers::Target& target, const Vector& at) {
  Vector grad;
  target.evaluate(at, grad);
  Vector fd(at.size());
  Vector scratch;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Vector p = at, m = at;
    const double h = fd_step(at[i]);
    p[i] += h;
    m[i] -= h;
    fd[i] = (target.evaluate(p, scratch) - target.evaluate(m, scratch)) / (2.0 * h);
  }
  return {name, static_cast<std::size_t>(at.size()), relative_error(grad, fd)};
}

// Same check for a scalar built from parameter tensors.
GradientCase check_parameters(const std::string& name, const std::vector<ad::NamedTensor>& params,
                              const std::function<ad::Tensor()>& loss) {
  ad::zero_grads(params);
  loss().backward();
  std::vector<double> analytic, numeric;
  for (const auto& p : params) {
    auto g = p.tensor.grad();
    analytic.insert(analytic.end(), g.begin(), g.end());
    auto vals = const_cast<ad::Tensor&>(p.tensor).mutable_values();
    for (double& v : vals) {
      const double orig = v;
      const double h = fd_step(orig);
      v = orig + h;
      const double up = loss().item();
      v = orig - h;
      const double down = loss().item();
      v = orig;
      numeric.push_back((up - down) / (2.0 * h));
    }
  }
  ad::zero_grads(params);
  const Eigen::Map<const Vector> a(analytic.data(), static_cast<Eigen::Index>(analytic.size()));
  const Eigen::Map<const Vector> f(numeric.data(), static_cast<Eigen::Index>(numeric.size()));
  return {name, analytic.size(), relative_error(a, f)};
}

ad::Mlp small_mlp(std::vector<std::size_t> sizes, ad::Activation act, bool layer_norm, ad::InitSpec init, Rng& rng) {
  ad::MlpSpec spec;
  spec.sizes = std::move(sizes);
  spec.hidden_activation = act;
  spec.layer_norm = layer_norm;
  spec.init = init;
  return ad::Mlp(spec, rng);
}

models::LatentVariableModel small_image_model(std::size_t d_z, std::size_t pixels, Rng& rng) {
  auto mlp = small_mlp({d_z, 4, 4, pixels}, ad::Activation::kRelu, true, {ad::InitSpec::Kind::kHe, 1.0, 0.1}, rng);
  return models::LatentVariableModel(
      models::GaussianPrior::standard(d_z),
      std::make_unique<models::DiscretizedLogisticLikelihood>(std::move(mlp), 0.3, 50));
}

Matrix random_pixels(std::size_t n, std::size_t d, Rng& rng) {
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x.data()[i] = models::pixel_to_unit(static_cast<std::uint8_t>(rng.below(256)));
  }
  return x;
}

Vector random_vector(std::size_t n, double scale, Rng& rng) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace

EquivalenceResult one_hot_equivalence(std::size_t datapoints, std::size_t feature_dim, std::size_t steps,
                                      bool mh_correction, std::uint64_t seed) {
  if (mh_correction && datapoints != 1) {
    throw ContractError("batch and per-datapoint acceptance agree only for one datapoint");
  }
  const auto model = conjugate_model();
  Rng rng(seed);
  const Matrix x = toy_observations(model, datapoints, rng);
  const std::size_t d_z = model.latent_dim();
  const auto n = static_cast<Eigen::Index>(datapoints);

  encoder::AmortizedEncoder enc(std::make_unique<encoder::OneHotFeatures>(x.cols(), feature_dim), d_z);
  samplers::AmortizedTarget ald_target(model, x, enc.features(x).to_matrix());
  samplers::SamplerConfig cfg;
  cfg.mh_correction = mh_correction;
  cfg.check_cache = true;

  samplers::ChainState ald = samplers::init_chain(ald_target, Vector::Zero(static_cast<Eigen::Index>(d_z * feature_dim)),
                                                  1.0, seed);
  std::vector<samplers::LatentTarget> ld_targets;
  std::vector<samplers::ChainState> ld;
  for (Eigen::Index i = 0; i < n; ++i) ld_targets.emplace_back(model, x.row(i).transpose());
  for (Eigen::Index i = 0; i < n; ++i) {
    ld.push_back(samplers::init_chain(ld_targets[static_cast<std::size_t>(i)], Vector::Zero(static_cast<Eigen::Index>(d_z)), 1.0, seed));
  }

  EquivalenceResult out;
  out.steps = steps;
  Vector noise(static_cast<Eigen::Index>(d_z * feature_dim));
  for (std::size_t t = 0; t < steps; ++t) {
    rng.fill_normal({noise.data(), static_cast<std::size_t>(noise.size())});
    const double u = mh_correction ? rng.uniform() : 0.0;
    samplers::langevin_step(ald_target, ald, cfg, noise, u);
    const Matrix z_ald = ald_target.latents(ald.position);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector xi(static_cast<Eigen::Index>(d_z));
      for (std::size_t k = 0; k < d_z; ++k) {
        xi[static_cast<Eigen::Index>(k)] = noise[static_cast<Eigen::Index>(k * feature_dim) + i];
      }
      auto& chain = ld[static_cast<std::size_t>(i)];
      samplers::langevin_step(ld_targets[static_cast<std::size_t>(i)], chain, cfg, xi, u);
      worst = std::max(worst, (z_ald.row(i).transpose() - chain.position).cwiseAbs().maxCoeff());
    }
    out.per_step.push_back(worst);
    out.max_deviation = std::max(out.max_deviation, worst);
  }
  return out;
}

std::vector<GradientCase> gradient_checks(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradientCase> out;

  const auto conj = conjugate_model();
  {
    const Vector x = random_vector(2, 1.5, rng);
    out.push_back(check_target("ld-drift/conjugate", samplers::LatentTarget(conj, x), random_vector(2, 1.0, rng)));
  }

  auto toy_mlp = small_mlp({2, 8, 8, 2}, ad::Activation::kRelu, false, {ad::InitSpec::Kind::kNormal, 0.5, 0.1}, rng);
  const models::LatentVariableModel toy(models::GaussianPrior::standard(2),
                                        std::make_unique<models::NeuralGaussianLikelihood>(std::move(toy_mlp), 0.25));
  {
    const Vector x = random_vector(2, 0.5, rng);
    out.push_back(check_target("ld-drift/neural-gaussian", samplers::LatentTarget(toy, x), random_vector(2, 1.0, rng)));
  }

  const std::size_t pixels = 6;
  const auto image = small_image_model(2, pixels, rng);
  {
    const Matrix x = random_pixels(1, pixels, rng);
    out.push_back(check_target("ld-drift/discretized-logistic", samplers::LatentTarget(image, x.row(0).transpose()),
                               random_vector(2, 1.0, rng)));
  }

  {
    const Matrix x = random_pixels(4, pixels, rng);
    encoder::FeatureConfig fc;
    fc.kind = "relu";
    fc.hidden = 3;
    fc.hidden_layers = 1;
    fc.feature_dim = 5;
    fc.row_norm = 0.0;
    fc.layer_norm = true;
    encoder::AmortizedEncoder enc(encoder::make_features(fc, pixels, rng), 2);
    enc.randomize_phi(0.3, rng);
    const Matrix g = enc.features(x).to_matrix();
    out.push_back(check_target("ald-drift/discretized-logistic", samplers::AmortizedTarget(image, x, g),
                               samplers::flatten(enc.phi_matrix())));
    Matrix xt(3, 2);
    for (Eigen::Index i = 0; i < xt.size(); ++i) xt.data()[i] = rng.normal();
    encoder::FeatureConfig sc;
    sc.hidden = 6;
    sc.feature_dim = 4;
    encoder::AmortizedEncoder sin_enc(encoder::make_features(sc, 2, rng), 2);
    sin_enc.randomize_phi(0.05, rng);
    out.push_back(check_target("ald-drift/neural-gaussian",
                               samplers::AmortizedTarget(toy, xt, sin_enc.features(xt).to_matrix()),
                               samplers::flatten(sin_enc.phi_matrix())));

    const auto phis = trainers::ald_inner_loop(image, enc, x, 2, 1e-2, true, rng.split(), nullptr);
    for (auto est : {trainers::Estimator::kTimeAveraged, trainers::Estimator::kFinalSample}) {
      auto loss = [&] {
        ad::Tensor l = trainers::lae_objective(image, enc, x, phis, est);
        ad::Tensor reg = image.likelihood().training_regularizer(static_cast<std::size_t>(x.rows()));
        return ad::add(l, reg);
      };
      const std::string tag = trainers::estimator_name(est);
      out.push_back(check_parameters("lae-theta/" + tag, image.parameters(), loss));
      out.push_back(check_parameters("lae-psi/" + tag, enc.psi_parameters(), loss));
    }
  }
  return out;
}

std::vector<NormalizationCase> logistic_normalization(std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NormalizationCase> out;
  for (std::size_t c = 0; c < pairs; ++c) {
    NormalizationCase r;
    r.mu = -1.5 + 3.0 * rng.uniform();
    r.scale_pre = -6.0 + 14.0 * rng.uniform();
    const double inv_s = models::inverse_scale_from_pre(r.scale_pre);
    for (int k = 0; k < 256; ++k) {
      const double xk = models::pixel_to_unit(static_cast<std::uint8_t>(k));
      r.total += std::exp(models::discretized_logistic_log_prob(xk, r.mu, inv_s));
    }
    out.push_back(r);
  }
  return out;
}

std::string conjugate_csv(const PosteriorRun& run) {
  std::ostringstream os;
  os << "datapoint,x_0,x_1,sample_mean_0,sample_mean_1,mean_err,cov_frob_err,det_ratio,acceptance\n";
  for (std::size_t i = 0; i < run.metrics.size(); ++i) {
    const Vector m = sample_mean(run.store.samples(i));
    const auto& r = run.metrics[i];
    os << i << ',' << num(run.x(static_cast<Eigen::Index>(i), 0)) << ',' << num(run.x(static_cast<Eigen::Index>(i), 1))
       << ',' << num(m[0]) << ',' << num(m[1]) << ',' << num(r.mean_err) << ',' << num(r.cov_frob_err) << ','
       << num(r.det_ratio) << ',' << num(run.store.stats().acceptance_rate()) << '\n';
  }
  return os.str();
}

std::string equivalence_csv(const EquivalenceResult& r) {
  std::ostringstream os;
  os << "step,max_abs_deviation\n";
  for (std::size_t t = 0; t < r.per_step.size(); t += 50) os << t << ',' << num(r.per_step[t]) << '\n';
  os << "max," << num(r.max_deviation) << '\n';
  return os.str();
}

std::string gradient_csv(const std::vector<GradientCase>& cases) {
  std::ostringstream os;
  os << "case,parameters,rel_error\n";
  for (const auto& c : cases) os << c.name << ',' << c.parameters << ',' << num(c.rel_error) << '\n';
  return os.str();
}

std::string normalization_csv(const std::vector<NormalizationCase>& cases) {
  std::ostringstream os;
  os << "mu,scale_pre,total\n";
  for (const auto& c : cases) os << num(c.mu) << ',' << num(c.scale_pre) << ',' << num(c.total) << '\n';
  return os.str();
}

std::vector<SelftestFile> selftest_artifacts() {
  ExperimentConfig cfg = default_config("conjugate-ald");
  cfg.seed = kSelftestSeed;
  std::vector<SelftestFile> out;
  out.push_back({"conjugate_ald.csv", conjugate_csv(run_conjugate_ald(cfg))});
  std::string eq = equivalence_csv(one_hot_equivalence(3, 5, 1000, false, kSelftestSeed));
  eq += equivalence_csv(one_hot_equivalence(1, 1, 1000, true, kSelftestSeed));
  out.push_back({"one_hot_equivalence.csv", eq});
  out.push_back({"gradients.csv", gradient_csv(gradient_checks(kSelftestSeed))});
  out.push_back({"logistic_normalization.csv", normalization_csv(logistic_normalization(100, kSelftestSeed))});
  return out;
}

}  // namespace lae::harness
