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
#include <filesystem>
#include <string>
#include <vector>

#include "lae/harness/experiments.hpp"

namespace lae::harness {

/// Fixed-seed reruns of the determinism checks. Each check renders its
/// results as CSV text so reruns can be compared byte for byte.

inline constexpr std::uint64_t kSelftestSeed = 2026;

struct EquivalenceResult {
  std::size_t steps = 0;
  /// Largest |z_ald - z_ld| over all steps, datapoints and coordinates.
  double max_deviation = 0.0;
  /// Per-step maximum deviation.
  std::vector<double> per_step;
};

/// One-hot-feature ALD against per-datapoint LD driven by the same noise.
/// With `mh_correction` the comparison uses a single datapoint, where the
/// batch acceptance test and the per-datapoint test coincide.
EquivalenceResult one_hot_equivalence(std::size_t datapoints, std::size_t feature_dim, std::size_t steps,
                                      bool mh_correction, std::uint64_t seed);

struct GradientCase {
  std::string name;
  std::size_t parameters = 0;
  double rel_error = 0.0;
};

/// Central finite differences against reverse-mode gradients for the Langevin
/// drift, the amortized drift, and the decoder and feature-extractor updates
/// of the autoencoder objective.
std::vector<GradientCase> gradient_checks(std::uint64_t seed);

struct NormalizationCase {
  double mu = 0.0;
  double scale_pre = 0.0;
  double total = 0.0;
};

/// Pixel probabilities over the 256-value grid for random (mu, b) pairs.
std::vector<NormalizationCase> logistic_normalization(std::size_t pairs, std::uint64_t seed);

std::string conjugate_csv(const PosteriorRun& run);
std::string equivalence_csv(const EquivalenceResult& r);
std::string gradient_csv(const std::vector<GradientCase>& cases);
std::string normalization_csv(const std::vector<NormalizationCase>& cases);

struct SelftestFile {
  std::string name;
  std::string contents;
};

/// Recomputes every selftest artifact from `kSelftestSeed`.
std::vector<SelftestFile> selftest_artifacts();

}  // namespace lae::harness
