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

#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "lae/common/rng.hpp"
#include "lae/common/types.hpp"

namespace lae::samplers {

struct SamplerConfig {
  double step_size = 4e-4;
  /// Inverse temperature; the chain targets exp(-beta U).
  double beta = 1.0;
  bool mh_correction = true;
  std::size_t burn_in = 1000;
  std::size_t total_steps = 3000;
  std::uint64_t seed = 0;
  /// Re-evaluate the potential after every step and compare with the cache.
  bool check_cache = false;

  /// Throws ConfigError unless step_size > 0, beta > 0 and burn_in < total_steps.
  void validate() const;
};

inline constexpr double kDivergenceBound = 1e8;

/// z - eta * grad + sqrt(2 eta) * noise. Throws SamplerError when `grad`
/// contains a non-finite entry.
Vector langevin_propose(const Vector& z, const Vector& grad, double eta, const Vector& noise);

/// log N(z_to; z_from - eta * grad_from, 2 eta I), normalizing constant included.
double gaussian_proposal_logdensity(const Vector& z_to, const Vector& z_from,
                                    const Vector& grad_from, double eta);

struct MhStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  std::size_t nonfinite = 0;
  double acceptance_rate() const {
    return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  }
  MhStats& operator+=(const MhStats& o) {
    proposed += o.proposed;
    accepted += o.accepted;
    nonfinite += o.nonfinite;
    return *this;
  }
};

/// Log-space Metropolis-Hastings test. Any non-finite input rejects and is
/// counted in `stats->nonfinite`.
bool mh_accept(double u_cur, double u_prop, double logq_fwd, double logq_rev, double u,
               MhStats* stats = nullptr);

/// A differentiable potential over a flat real state.
class Target {
 public:
  virtual ~Target() = default;
  virtual std::size_t dim() const = 0;
  /// Potential at `state`; writes the gradient into `grad` (resized as
  /// needed). Returns +infinity if the potential cannot be evaluated.
  virtual double evaluate(const Vector& state, Vector& grad) const = 0;
};

/// Target defined by a callable, for potentials outside the model classes.
class FunctionTarget final : public Target {
 public:
  using Fn = std::function<double(const Vector&, Vector&)>;
  FunctionTarget(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
  std::size_t dim() const override { return dim_; }
  double evaluate(const Vector& state, Vector& grad) const override { return fn_(state, grad); }

 private:
  std::size_t dim_;
  Fn fn_;
};

/// Current position of one chain with its cached potential and gradient.
/// `potential` and `gradient` refer to beta * U.
struct ChainState {
  Vector position;
  double potential = std::numeric_limits<double>::quiet_NaN();
  Vector gradient;
  MhStats stats;
  std::size_t steps = 0;
  Rng rng;
};

/// Evaluate the target at `position` and fill the cache.
ChainState init_chain(const Target& target, Vector position, double beta, std::uint64_t seed);

/// Throws SamplerError if the cached potential differs from a fresh
/// evaluation by more than `tol`.
void verify_cache(const Target& target, const ChainState& state, double beta, double tol = 1e-12);

/// One Langevin transition with caller-supplied standard-normal `noise` and
/// uniform `u` (ignored without MH). Returns whether the proposal was kept.
/// On rejection the state is left exactly as it was.
bool langevin_step(const Target& target, ChainState& state, const SamplerConfig& cfg,
                   const Vector& noise, double u);

/// Same transition drawing the noise first and then the uniform from the
/// chain's own stream.
bool langevin_step(const Target& target, ChainState& state, const SamplerConfig& cfg);

}  // namespace lae::samplers
