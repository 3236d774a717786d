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

#include "lae/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "lae/common/error.hpp"

namespace lae::harness {

namespace {

void require_samples(const Matrix& samples) {
  if (static_cast<std::size_t>(samples.rows()) < kMinMetricSamples) {
    throw ContractError("sample metrics need at least " + std::to_string(kMinMetricSamples) + " samples, got " +
                        std::to_string(samples.rows()));
  }
}

SampleMetrics moment_metrics(const Matrix& samples, const Vector& mean, const Matrix& cov) {
  SampleMetrics m;
  const Matrix c = sample_covariance(samples);
  m.mean_err = (sample_mean(samples) - mean).norm();
  m.cov_frob_err = (c - cov).norm();
  m.det_ratio = c.determinant() / cov.determinant();
  return m;
}

}  // namespace

Vector sample_mean(const Matrix& samples) { return samples.colwise().mean().transpose(); }

Matrix sample_covariance(const Matrix& samples) {
  if (samples.rows() < 2) throw ContractError("covariance needs at least two samples");
  const Matrix centered = samples.rowwise() - samples.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
}

double hist_tv(const Matrix& samples, const GridOracle& oracle, std::size_t bins) {
  if (samples.cols() != 2) throw DimensionError("histogram distance needs two-dimensional samples");
  const Matrix ref = oracle.histogram(bins);
  Matrix counts = Matrix::Zero(ref.rows(), ref.cols());
  const auto& b = oracle.bounds();
  const double w0 = (b.hi[0] - b.lo[0]) / static_cast<double>(bins);
  const double w1 = (b.hi[1] - b.lo[1]) / static_cast<double>(bins);
  double outside = 0.0;
  const double unit = 1.0 / static_cast<double>(samples.rows());
  for (Eigen::Index t = 0; t < samples.rows(); ++t) {
    const double z0 = samples(t, 0), z1 = samples(t, 1);
    if (!b.contains(z0, z1)) {
      outside += unit;
      continue;
    }
    const auto i = std::min<Eigen::Index>(ref.rows() - 1, static_cast<Eigen::Index>((z0 - b.lo[0]) / w0));
    const auto j = std::min<Eigen::Index>(ref.cols() - 1, static_cast<Eigen::Index>((z1 - b.lo[1]) / w1));
    counts(i, j) += unit;
  }
  return 0.5 * ((counts - ref).cwiseAbs().sum() + outside);
}

SampleMetrics sample_metrics(const Matrix& samples, const GridOracle& oracle) {
  require_samples(samples);
  SampleMetrics m = moment_metrics(samples, oracle.mean(), oracle.covariance());
  m.hist_tv = hist_tv(samples, oracle);
  return m;
}

SampleMetrics sample_metrics(const Matrix& samples, const ConjugateOracle& oracle, const Vector& x) {
  require_samples(samples);
  const GaussianMoments post = oracle.posterior(x);
  SampleMetrics m = moment_metrics(samples, post.mean, post.covariance);
  if (oracle.dim() == 2) m.hist_tv = hist_tv(samples, gaussian_grid(post));
  return m;
}

}  // namespace lae::harness
