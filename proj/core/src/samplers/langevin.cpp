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

#include "lae/samplers/langevin.hpp"

#include <cmath>
#include <numbers>

#include "lae/common/error.hpp"

namespace lae::samplers {

void SamplerConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step size must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("inverse temperature must be positive");
  if (total_steps == 0) throw ConfigError("total_steps must be positive");
  if (burn_in >= total_steps) throw ConfigError("burn_in must be smaller than total_steps");
}

Vector langevin_propose(const Vector& z, const Vector& grad, double eta, const Vector& noise) {
  if (z.size() != grad.size() || z.size() != noise.size()) {
    throw DimensionError("langevin_propose: state, gradient and noise sizes differ");
  }
  if (!(eta > 0.0)) throw ConfigError("step size must be positive");
  if (!grad.allFinite()) throw SamplerError("non-finite gradient in Langevin proposal");
  return z - eta * grad + std::sqrt(2.0 * eta) * noise;
}

double gaussian_proposal_logdensity(const Vector& z_to, const Vector& z_from,
                                    const Vector& grad_from, double eta) {
  if (!(eta > 0.0)) throw ConfigError("step size must be positive");
  const Vector r = z_to - (z_from - eta * grad_from);
  const double k = static_cast<double>(z_to.size());
  return -0.5 * k * std::log(4.0 * std::numbers::pi * eta) - r.squaredNorm() / (4.0 * eta);
}

bool mh_accept(double u_cur, double u_prop, double logq_fwd, double logq_rev, double u,
               MhStats* stats) {
  if (stats) ++stats->proposed;
  const double log_ratio = (-u_prop + logq_rev) - (-u_cur + logq_fwd);
  if (!std::isfinite(u_cur) || !std::isfinite(u_prop) || !std::isfinite(logq_fwd) ||
      !std::isfinite(logq_rev) || !std::isfinite(log_ratio) || !(u > 0.0)) {
    if (stats) ++stats->nonfinite;
    return false;
  }
  const bool ok = std::log(u) < log_ratio;
  if (ok && stats) ++stats->accepted;
  return ok;
}

namespace {

double scaled_evaluate(const Target& target, const Vector& position, double beta, Vector& grad) {
  double u = target.evaluate(position, grad);
  if (beta != 1.0) {
    u *= beta;
    grad *= beta;
  }
  return u;
}

void check_divergence(const Vector& position) {
  if (!position.allFinite() || position.lpNorm<Eigen::Infinity>() > kDivergenceBound) {
    throw SamplerError("chain diverged: state norm exceeded " + std::to_string(kDivergenceBound));
  }
}

}  // namespace

ChainState init_chain(const Target& target, Vector position, double beta, std::uint64_t seed) {
  if (static_cast<std::size_t>(position.size()) != target.dim()) {
    throw DimensionError("initial state has size " + std::to_string(position.size()) +
                         ", target expects " + std::to_string(target.dim()));
  }
  if (!position.allFinite()) throw SamplerError("initial state is not finite");
  ChainState state;
  state.position = std::move(position);
  state.potential = scaled_evaluate(target, state.position, beta, state.gradient);
  if (!std::isfinite(state.potential)) throw SamplerError("potential is not finite at the initial state");
  state.rng = Rng(seed);
  return state;
}

void verify_cache(const Target& target, const ChainState& state, double beta, double tol) {
  Vector grad;
  const double fresh = scaled_evaluate(target, state.position, beta, grad);
  if (!(std::abs(fresh - state.potential) <= tol)) {
    throw SamplerError("cached potential " + std::to_string(state.potential) +
                       " disagrees with fresh evaluation " + std::to_string(fresh));
  }
}

bool langevin_step(const Target& target, ChainState& state, const SamplerConfig& cfg,
                   const Vector& noise, double u) {
  const double eta = cfg.step_size;
  Vector proposal = langevin_propose(state.position, state.gradient, eta, noise);
  ++state.steps;

  Vector prop_grad;
  double prop_u = std::numeric_limits<double>::infinity();
  if (proposal.allFinite()) prop_u = scaled_evaluate(target, proposal, cfg.beta, prop_grad);

  bool accept = true;
  if (cfg.mh_correction) {
    double logq_fwd = 0.0, logq_rev = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(prop_u) && prop_grad.allFinite()) {
      logq_fwd = gaussian_proposal_logdensity(proposal, state.position, state.gradient, eta);
      logq_rev = gaussian_proposal_logdensity(state.position, proposal, prop_grad, eta);
    }
    accept = mh_accept(state.potential, prop_u, logq_fwd, logq_rev, u, &state.stats);
  } else {
    ++state.stats.proposed;
    if (!std::isfinite(prop_u)) {
      ++state.stats.nonfinite;
      throw SamplerError("chain diverged: potential is not finite after an unadjusted step");
    }
    ++state.stats.accepted;
  }

  if (accept) {
    check_divergence(proposal);
    state.position = std::move(proposal);
    state.potential = prop_u;
    state.gradient = std::move(prop_grad);
  }
  if (cfg.check_cache) verify_cache(target, state, cfg.beta);
  return accept;
}

bool langevin_step(const Target& target, ChainState& state, const SamplerConfig& cfg) {
  Vector noise(state.position.size());
  state.rng.fill_normal(std::span<double>(noise.data(), static_cast<std::size_t>(noise.size())));
  const double u = cfg.mh_correction ? state.rng.uniform() : 0.5;
  return langevin_step(target, state, cfg, noise, u);
}

}  // namespace lae::samplers
