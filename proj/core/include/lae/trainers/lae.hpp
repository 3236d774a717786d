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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lae/encoder/encoder.hpp"
#include "lae/models/model.hpp"
#include "lae/samplers/langevin.hpp"
#include "lae/trainers/elbo.hpp"
#include "lae/trainers/report.hpp"
#include "lae/trainers/variational.hpp"

namespace lae::trainers {

/// Which ALD states feed the decoder and feature-extractor update.
enum class Estimator {
  kTimeAveraged,  ///< (1/T) sum_t V(Phi_t)
  kFinalSample,   ///< V(Phi_T)
};

Estimator parse_estimator(const std::string& name);
const char* estimator_name(Estimator e);

struct LAEConfig {
  /// ALD steps per minibatch. 0 trains Phi by gradient descent instead,
  /// which is the prior-regularized autoencoder.
  std::size_t inner_steps = 2;
  /// Learning rate for theta (and Phi when inner_steps == 0).
  double learning_rate = 1e-4;
  /// Learning rate for the feature extractor or the variational encoder.
  double feature_learning_rate = 1e-4;
  std::size_t batch_size = 100;
  /// Langevin step size for ALD and for the refinement chains.
  double step_size = 1e-4;
  bool mh_correction = true;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::kTimeAveraged;
  /// "sgd" or "adam".
  std::string optimizer = "sgd";
  double eval_sigma = kDefaultElboSigma;
  std::size_t eval_samples = kDefaultElboSamples;
  /// Receives one line per epoch when set.
  std::ostream* progress = nullptr;

  void validate() const;
};

/// Training objective for one minibatch given the recorded ALD states:
/// V(Phi_t) = sum_i U(x_i, Phi_t g(x_i; psi); theta), averaged over t or
/// taken at the last t. Differentiable in theta and psi; Phi_t are constants.
ad::Tensor lae_objective(const models::LatentVariableModel& model, const encoder::AmortizedEncoder& enc,
                         const Matrix& x, std::span<const Matrix> phis, Estimator estimator);

/// Run `steps` ALD transitions on the encoder's Phi for one minibatch and
/// return the post-MH states Phi_1..Phi_T. The encoder ends at Phi_T.
std::vector<Matrix> ald_inner_loop(const models::LatentVariableModel& model, encoder::AmortizedEncoder& enc,
                                   const Matrix& x, std::size_t steps, double step_size, bool mh,
                                   std::uint64_t seed, samplers::MhStats* stats);

/// Langevin autoencoder training; inner_steps == 0 gives the
/// prior-regularized autoencoder. `heldout` may be empty.
TrainReport train_lae(models::LatentVariableModel& model, encoder::AmortizedEncoder& enc,
                      const Matrix& train, const Matrix& heldout, const LAEConfig& cfg);

/// Single-sample reparameterized ELBO training.
TrainReport train_vae(models::LatentVariableModel& model, GaussianVariationalEncoder& venc,
                      const Matrix& train, const Matrix& heldout, const LAEConfig& cfg);

/// Encoder-initialized Langevin refinement: z0 ~ q, `ld_steps` MH-corrected
/// Langevin steps per row, theta from the refined sample and phi from the
/// ELBO at z0.
TrainReport train_hoffman(models::LatentVariableModel& model, GaussianVariationalEncoder& venc,
                          const Matrix& train, const Matrix& heldout, const LAEConfig& cfg,
                          std::size_t ld_steps);

}  // namespace lae::trainers
