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

#include "lae/samplers/ald.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"

namespace lae::samplers {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector copy_grad(const ad::Tensor& t) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(t.size()));
  auto src = t.grad();
  if (!src.empty()) std::copy(src.begin(), src.end(), g.data());
  return g;
}

}  // namespace

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unflatten(const Vector& v, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(v.size()) != rows * cols) throw DimensionError("unflatten: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

LatentTarget::LatentTarget(const models::LatentVariableModel& model, const Vector& x)
    : model_(model), x_(x.transpose()) {
  if (static_cast<std::size_t>(x.size()) != model.data_dim()) {
    throw DimensionError("observation has dimension " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(model.data_dim()));
  }
}

double LatentTarget::evaluate(const Vector& z, Vector& grad) const {
  ad::FreezeGuard freeze(model_.parameters());
  ad::Tensor zt = ad::Tensor::parameter({1, static_cast<std::size_t>(z.size())},
                                        std::vector<double>(z.data(), z.data() + z.size()));
  try {
    ad::Tensor u = ad::sum(model_.potential(x_, zt));
    u.backward();
    grad = copy_grad(zt);
    return u.item();
  } catch (const NumericError&) {
    grad = Vector::Constant(z.size(), std::numeric_limits<double>::quiet_NaN());
    return kInf;
  }
}

AmortizedTarget::AmortizedTarget(const models::LatentVariableModel& model, const Matrix& x,
                                 Matrix features)
    : model_(model), x_(x), g_(std::move(features)) {
  if (x_.rows() != g_.rows()) throw DimensionError("one feature row per datapoint expected");
  if (static_cast<std::size_t>(x_.cols()) != model.data_dim()) {
    throw DimensionError("batch dimension does not match the model");
  }
}

double AmortizedTarget::evaluate(const Vector& phi, Vector& grad) const {
  ad::FreezeGuard freeze(model_.parameters());
  const std::size_t d_z = model_.latent_dim();
  const auto d = static_cast<std::size_t>(g_.cols());
  ad::Tensor phit = ad::Tensor::parameter({d_z, d}, std::vector<double>(phi.data(), phi.data() + phi.size()));
  try {
    ad::Tensor z = encoder::AmortizedEncoder::encode_with(ad::Tensor::constant(g_), phit);
    ad::Tensor v = ad::sum(model_.potential(x_, z));
    v.backward();
    grad = copy_grad(phit);
    return v.item();
  } catch (const NumericError&) {
    grad = Vector::Constant(phi.size(), std::numeric_limits<double>::quiet_NaN());
    return kInf;
  }
}

Matrix AmortizedTarget::latents(const Vector& phi) const {
  const Matrix p = unflatten(phi, model_.latent_dim(), static_cast<std::size_t>(g_.cols()));
  return g_ * p.transpose();
}

SampleStore run_ld(const models::LatentVariableModel& model, const Vector& x,
                   const SamplerConfig& cfg, const Vector& z0) {
  cfg.validate();
  LatentTarget target(model, x);
  ChainState state = init_chain(target, z0, cfg.beta, cfg.seed);
  SampleStore store(1, model.latent_dim(), cfg.burn_in);
  for (std::size_t t = 0; t < cfg.total_steps; ++t) {
    const bool ok = langevin_step(target, state, cfg);
    store.append(Matrix(state.position.transpose()), ok);
  }
  store.stats() = state.stats;
  return store;
}

SampleStore run_ald(const models::LatentVariableModel& model, const Matrix& x,
                    encoder::AmortizedEncoder& enc, const SamplerConfig& cfg) {
  cfg.validate();
  if (enc.latent_dim() != model.latent_dim()) throw DimensionError("encoder and model latent sizes differ");
  Matrix g;
  {
    ad::FreezeGuard freeze(enc.psi_parameters());
    g = enc.features(x).to_matrix();
  }
  AmortizedTarget target(model, x, std::move(g));
  ChainState state = init_chain(target, flatten(enc.phi_matrix()), cfg.beta, cfg.seed);
  SampleStore store(static_cast<std::size_t>(x.rows()), model.latent_dim(), cfg.burn_in);
  for (std::size_t t = 0; t < cfg.total_steps; ++t) {
    const bool ok = langevin_step(target, state, cfg);
    store.append(target.latents(state.position), ok);
  }
  store.stats() = state.stats;
  enc.set_phi(unflatten(state.position, enc.latent_dim(), enc.feature_dim()));
  return store;
}

SampleStore warm_start_ld(const models::LatentVariableModel& model, const Vector& x_new,
                          const encoder::AmortizedEncoder& enc, const SamplerConfig& cfg) {
  Vector z0;
  {
    ad::FreezeGuard freeze(enc.parameters());
    z0 = enc.encode(Matrix(x_new.transpose())).to_matrix().row(0).transpose();
  }
  return run_ld(model, x_new, cfg, z0);
}

namespace {

// Row-wise potentials and gradients of beta * U; rows that fail to
// evaluate get +infinity.
void evaluate_rows(const models::LatentVariableModel& model, const Matrix& x, const Matrix& z,
                   double beta, Vector& potential, Matrix& gradient) {
  ad::FreezeGuard freeze(model.parameters());
  ad::Tensor zt = ad::Tensor::parameter(z);
  try {
    ad::Tensor u = model.potential(x, zt);
    ad::sum(u).backward();
    potential = beta * Eigen::Map<const Vector>(u.values().data(), z.rows());
    gradient = beta * Eigen::Map<const Matrix>(zt.grad().data(), z.rows(), z.cols());
  } catch (const NumericError&) {
    // Fall back to one row at a time so a single bad row does not poison the rest.
    potential.resize(z.rows());
    gradient.resize(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      ad::Tensor zi = ad::Tensor::parameter(Matrix(z.row(i)));
      try {
        ad::Tensor ui = ad::sum(model.potential(Matrix(x.row(i)), zi));
        ui.backward();
        potential[i] = beta * ui.item();
        gradient.row(i) = beta * Eigen::Map<const Vector>(zi.grad().data(), z.cols()).transpose();
      } catch (const NumericError&) {
        potential[i] = kInf;
        gradient.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
}

}  // namespace

BatchChainState init_batch_chain(const models::LatentVariableModel& model, const Matrix& x,
                                 Matrix z0, double beta) {
  if (z0.rows() != x.rows() || static_cast<std::size_t>(z0.cols()) != model.latent_dim()) {
    throw DimensionError("initial latents must be [n x d_z]");
  }
  BatchChainState state;
  state.z = std::move(z0);
  evaluate_rows(model, x, state.z, beta, state.potential, state.gradient);
  if (!state.potential.allFinite()) throw SamplerError("potential is not finite at the initial latents");
  return state;
}

std::vector<char> ld_batch_step(const models::LatentVariableModel& model, const Matrix& x,
                                BatchChainState& state, const SamplerConfig& cfg, Rng& rng) {
  const double eta = cfg.step_size;
  const Eigen::Index n = state.z.rows();
  Matrix noise(n, state.z.cols());
  rng.fill_normal(std::span<double>(noise.data(), static_cast<std::size_t>(noise.size())));
  if (!state.gradient.allFinite()) throw SamplerError("non-finite gradient in Langevin proposal");
  Matrix proposal = state.z - eta * state.gradient + std::sqrt(2.0 * eta) * noise;

  Vector prop_u;
  Matrix prop_grad;
  evaluate_rows(model, x, proposal, cfg.beta, prop_u, prop_grad);

  std::vector<char> flags(static_cast<std::size_t>(n), 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    bool accept = true;
    if (cfg.mh_correction) {
      const double u = rng.uniform();
      double logq_fwd = 0.0, logq_rev = std::numeric_limits<double>::quiet_NaN();
      if (std::isfinite(prop_u[i]) && prop_grad.row(i).allFinite()) {
        logq_fwd = gaussian_proposal_logdensity(proposal.row(i).transpose(), state.z.row(i).transpose(),
                                                state.gradient.row(i).transpose(), eta);
        logq_rev = gaussian_proposal_logdensity(state.z.row(i).transpose(), proposal.row(i).transpose(),
                                                prop_grad.row(i).transpose(), eta);
      }
      accept = mh_accept(state.potential[i], prop_u[i], logq_fwd, logq_rev, u, &state.stats);
    } else {
      ++state.stats.proposed;
      if (!std::isfinite(prop_u[i])) {
        ++state.stats.nonfinite;
        throw SamplerError("chain diverged: potential is not finite after an unadjusted step");
      }
      ++state.stats.accepted;
    }
    if (accept) {
      if (proposal.row(i).cwiseAbs().maxCoeff() > kDivergenceBound) {
        throw SamplerError("chain diverged: state norm exceeded " + std::to_string(kDivergenceBound));
      }
      state.z.row(i) = proposal.row(i);
      state.potential[i] = prop_u[i];
      state.gradient.row(i) = prop_grad.row(i);
    }
    flags[static_cast<std::size_t>(i)] = accept ? 1 : 0;
  }
  return flags;
}

}  // namespace lae::samplers
