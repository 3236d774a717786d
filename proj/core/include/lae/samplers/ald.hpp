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

#include <vector>

#include "lae/encoder/encoder.hpp"
#include "lae/models/model.hpp"
#include "lae/samplers/langevin.hpp"
#include "lae/samplers/sample_store.hpp"

namespace lae::samplers {

/// U(x, z) for one observation, as a function of z. Model parameters are
/// frozen while the tape is built.
class LatentTarget final : public Target {
 public:
  LatentTarget(const models::LatentVariableModel& model, const Vector& x);
  std::size_t dim() const override { return model_.latent_dim(); }
  double evaluate(const Vector& z, Vector& grad) const override;

 private:
  const models::LatentVariableModel& model_;
  Matrix x_;
};

/// V(Phi) = sum_i U(x_i, Phi g(x_i)) over a fixed feature matrix G. The
/// state is Phi flattened row-major, shape [d_z x d].
class AmortizedTarget final : public Target {
 public:
  AmortizedTarget(const models::LatentVariableModel& model, const Matrix& x, Matrix features);
  std::size_t dim() const override { return model_.latent_dim() * static_cast<std::size_t>(g_.cols()); }
  double evaluate(const Vector& phi, Vector& grad) const override;
  /// Latents Z = G Phi^T, shape [n x d_z].
  Matrix latents(const Vector& phi) const;
  const Matrix& features() const { return g_; }

 private:
  const models::LatentVariableModel& model_;
  Matrix x_;
  Matrix g_;
};

Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& v, std::size_t rows, std::size_t cols);

/// Per-datapoint Langevin chain started at z0; one sample stored per step.
SampleStore run_ld(const models::LatentVariableModel& model, const Vector& x,
                   const SamplerConfig& cfg, const Vector& z0);

/// Amortized Langevin dynamics: the chain runs over the encoder's Phi with
/// psi fixed, and each step stores f(x_i) for every datapoint. The encoder
/// is left holding the final Phi.
SampleStore run_ald(const models::LatentVariableModel& model, const Matrix& x,
                    encoder::AmortizedEncoder& enc, const SamplerConfig& cfg);

/// run_ld started from the encoder's output for x_new.
SampleStore warm_start_ld(const models::LatentVariableModel& model, const Vector& x_new,
                          const encoder::AmortizedEncoder& enc, const SamplerConfig& cfg);

/// n independent latent chains advanced together, one per row, each with
/// its own accept/reject decision.
struct BatchChainState {
  Matrix z;
  Vector potential;
  Matrix gradient;
  MhStats stats;
};

BatchChainState init_batch_chain(const models::LatentVariableModel& model, const Matrix& x,
                                 Matrix z0, double beta = 1.0);

/// One step for every row. Noise for all rows is drawn before any uniform.
/// Returns the per-row accept flags.
std::vector<char> ld_batch_step(const models::LatentVariableModel& model, const Matrix& x,
                                BatchChainState& state, const SamplerConfig& cfg, Rng& rng);

}  // namespace lae::samplers
