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

#include "lae/harness/conjugate_oracle.hpp"
#include "lae/models/model.hpp"

namespace lae::harness {

enum class ViFamily { kDiagonal, kFull };

struct ViConfig {
  ViFamily family = ViFamily::kDiagonal;
  std::size_t iterations = 3000;
  /// Reparameterized draws per gradient step.
  std::size_t samples = 32;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

/// Gaussian q(z) fitted to p(z | x) by stochastic reparameterized ascent of
/// the ELBO with Adam, started from N(0, I).
GaussianMoments fit_gaussian_vi(const models::LatentVariableModel& model, const Vector& x, const ViConfig& cfg);

/// `count` independent draws, one per row.
Matrix sample_gaussian(const GaussianMoments& g, std::size_t count, Rng& rng);

}  // namespace lae::harness
