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

#include <iosfwd>
#include <memory>
#include <vector>

#include "lae/encoder/encoder.hpp"
#include "lae/harness/config.hpp"
#include "lae/harness/metrics.hpp"
#include "lae/models/model.hpp"
#include "lae/samplers/sample_store.hpp"
#include "lae/trainers/lae.hpp"

namespace lae::harness {

/// Toy observations x_i ~ p(x | z_i) with z_i ~ p(z), one per row.
Matrix toy_observations(const models::LatentVariableModel& model, std::size_t n, Rng& rng);

/// Model of `cfg.model.kind`. Image models need the data dimension and the
/// training-set size.
models::LatentVariableModel build_model(const ExperimentConfig& cfg, Rng& rng, std::size_t data_dim = 2,
                                        std::size_t training_size = 1);
encoder::AmortizedEncoder build_encoder(const ExperimentConfig& cfg, std::size_t input_dim, Rng& rng);
trainers::GaussianVariationalEncoder build_variational_encoder(const ExperimentConfig& cfg, std::size_t input_dim,
                                                               Rng& rng);

/// Samples and per-datapoint metrics of one posterior-sampling run.
struct PosteriorRun {
  Matrix x;
  samplers::SampleStore store{1, 1, 0};
  std::vector<SampleMetrics> metrics;
  encoder::RankDiagnostic rank;
  std::size_t feature_dim = 0;
  double seconds = 0.0;
};

/// ALD on the conjugate toy with cfg.features.feature_dim features.
PosteriorRun run_conjugate_ald(const ExperimentConfig& cfg);
/// Per-datapoint Langevin chains on the same observations, started at 0.
PosteriorRun run_conjugate_ld(const ExperimentConfig& cfg);

struct AblationRow {
  std::size_t feature_dim = 0;
  std::size_t rank = 0;
  double max_mean_err = 0.0;
  double max_cov_frob_err = 0.0;
  double min_det_ratio = 0.0;
  double max_det_ratio = 0.0;
  double acceptance_rate = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::vector<PosteriorRun> runs;
};

/// Conjugate ALD for every d in cfg.ablation_dims on shared observations.
AblationResult run_capacity_ablation(const ExperimentConfig& cfg);

struct NeuralPosteriorPoint {
  SampleMetrics ald, diagonal_vi, full_vi;
};

struct NeuralPosteriorResult {
  Matrix x;
  samplers::SampleStore store{1, 1, 0};
  std::vector<NeuralPosteriorPoint> points;
  std::vector<Matrix> diagonal_vi_samples, full_vi_samples;
  std::vector<Matrix> oracle_histograms;
  /// Mean histogram TV over datapoints.
  double ald_tv = 0.0, diagonal_vi_tv = 0.0, full_vi_tv = 0.0;
};

/// Box used for the neural toy's grid oracle.
inline constexpr double kNeuralGridHalfWidth = 4.0;

NeuralPosteriorResult run_neural_posterior(const ExperimentConfig& cfg);

struct ImageData {
  Matrix train;
  Matrix heldout;
};

/// IDX files when configured, procedurally generated digits otherwise.
ImageData load_image_data(const ExperimentConfig& cfg);

/// Train one method ("lae", "ae", "vae" or "hoffman") on image data. The
/// trained parameters are returned through `checkpoint` when non-null.
trainers::TrainReport run_image_training(const ExperimentConfig& cfg, const ImageData& data,
                                         const std::string& method, std::size_t ld_steps = 0,
                                         std::vector<ad::NamedTensor>* checkpoint = nullptr);

/// Held-out negative ELBO per dimension of a saved checkpoint.
trainers::ElboEstimate run_checkpoint_elbo(const ExperimentConfig& cfg, const ImageData& data);

/// Run `cfg.kind`, write artifacts under cfg.out_dir (when set) and log a
/// summary. Returns the process exit status.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace lae::harness
