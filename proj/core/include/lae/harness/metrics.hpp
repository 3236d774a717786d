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

#include "lae/harness/conjugate_oracle.hpp"
#include "lae/harness/grid_oracle.hpp"

namespace lae::harness {

struct SampleMetrics {
  /// Euclidean distance between sample mean and reference mean.
  double mean_err = 0.0;
  /// Frobenius norm of sample covariance minus reference covariance.
  double cov_frob_err = 0.0;
  /// Total variation between the 50 x 50 sample histogram and the
  /// reference histogram; sample mass outside the grid counts fully.
  double hist_tv = 0.0;
  /// det(sample covariance) / det(reference covariance).
  double det_ratio = 0.0;
};

inline constexpr std::size_t kMinMetricSamples = 100;

Vector sample_mean(const Matrix& samples);
/// Unbiased sample covariance.
Matrix sample_covariance(const Matrix& samples);

/// Histogram total variation against a grid oracle's bin masses.
double hist_tv(const Matrix& samples, const GridOracle& oracle, std::size_t bins = kDefaultHistogramBins);

/// Metrics of [T x 2] samples against a grid oracle. Throws
/// ContractError with fewer than 100 samples.
SampleMetrics sample_metrics(const Matrix& samples, const GridOracle& oracle);
/// Metrics against the closed-form posterior of x; the histogram reference
/// is the Gaussian tabulated on a grid.
SampleMetrics sample_metrics(const Matrix& samples, const ConjugateOracle& oracle, const Vector& x);

}  // namespace lae::harness
