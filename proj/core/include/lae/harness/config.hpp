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
#include <iosfwd>
#include <string>
#include <vector>

#include "lae/encoder/encoder.hpp"
#include "lae/samplers/langevin.hpp"
#include "lae/trainers/lae.hpp"

namespace lae::harness {

struct ModelConfig {
  /// "conjugate", "neural-toy" or "image".
  std::string kind = "conjugate";
  std::vector<double> obs_cov{0.7, 0.6, 0.6, 0.8};
  std::size_t latent_dim = 2;
  /// Neural toy decoder.
  std::size_t decoder_hidden = 128;
  std::size_t decoder_layers = 4;
  double decoder_weight_std = 0.2;
  double decoder_bias_std = 0.1;
  double sigma_x = 0.25;
  /// Image decoder.
  bool layer_norm = true;
  double initial_scale_pre = 0.0;
};

struct DataConfig {
  /// IDX image file, or empty for procedurally generated digits.
  std::string train_images;
  std::string heldout_images;
  std::size_t train_count = 4096;
  std::size_t heldout_count = 1024;
  /// Number of toy observations.
  std::size_t datapoints = 3;
  /// Seed of the generated digits, kept apart from the experiment seed so
  /// that reruns with new seeds train on the same images.
  std::uint64_t seed = 1;
  std::string checkpoint;
};

struct ExperimentConfig {
  std::string kind = "conjugate-ald";
  std::uint64_t seed = 2026;
  std::filesystem::path out_dir;
  ModelConfig model;
  encoder::FeatureConfig features;
  double phi_init_std = 0.0;
  samplers::SamplerConfig sampler;
  trainers::LAEConfig trainer;
  /// Refinement steps for the encoder-initialized baseline.
  std::vector<std::size_t> ld_steps{0, 2, 10};
  /// Feature dimensions of the capacity ablation.
  std::vector<std::size_t> ablation_dims{2, 3, 128};
  /// Hidden width of the variational encoder trunk.
  std::size_t venc_hidden = 256;
  DataConfig data;
  /// Optimization settings of the Gaussian VI baselines.
  std::size_t vi_iterations = 3000;
  std::size_t vi_samples = 32;
  double vi_learning_rate = 0.01;

  /// Throws ConfigError for inconsistent settings or missing input files.
  void validate() const;
};

/// Parse key = value lines grouped under [section] headers. Unknown
/// sections or keys are errors.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Defaults for each experiment kind before any file is applied.
ExperimentConfig default_config(const std::string& kind);

/// Apply a config file on top of an existing configuration.
void apply_config(ExperimentConfig& cfg, std::istream& is);

}  // namespace lae::harness
