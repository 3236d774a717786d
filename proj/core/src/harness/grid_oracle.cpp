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

#include "lae/harness/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lae/common/error.hpp"

namespace lae::harness {

GridBounds GridBounds::around(const Vector& mean, const Matrix& cov, double width) {
  if (mean.size() != 2 || cov.rows() != 2 || cov.cols() != 2) throw DimensionError("grid bounds need d_z = 2");
  GridBounds b;
  for (int k = 0; k < 2; ++k) {
    const double sd = std::sqrt(cov(k, k));
    b.lo[k] = mean[k] - width * sd;
    b.hi[k] = mean[k] + width * sd;
  }
  return b;
}

GridOracle::GridOracle(const std::function<Vector(const Matrix&)>& log_density, GridBounds bounds,
                       std::size_t resolution)
    : bounds_(bounds), res_(resolution) {
  if (res_ < 2) throw ConfigError("grid resolution must be at least 2");
  if (!(bounds_.hi[0] > bounds_.lo[0]) || !(bounds_.hi[1] > bounds_.lo[1])) throw ConfigError("empty grid bounds");
  const auto n = static_cast<Eigen::Index>(res_);
  Matrix centers(n * n, 2);
  for (std::size_t i = 0; i < res_; ++i) {
    for (std::size_t j = 0; j < res_; ++j) {
      centers.row(static_cast<Eigen::Index>(i * res_ + j)) = cell_center(i, j).transpose();
    }
  }
  const Vector logp = log_density(centers);
  if (logp.size() != n * n) throw DimensionError("grid log-density returned the wrong number of values");
  double max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < logp.size(); ++k) {
    if (std::isfinite(logp[k])) max = std::max(max, logp[k]);
  }
  if (!std::isfinite(max)) throw DomainError("grid oracle: the density has no mass inside the bounds");
  mass_.resize(n, n);
  for (Eigen::Index k = 0; k < logp.size(); ++k) {
    mass_.data()[k] = std::isfinite(logp[k]) ? std::exp(logp[k] - max) : 0.0;
  }
  mass_ /= mass_.sum();
}

Vector GridOracle::cell_center(std::size_t i, std::size_t j) const {
  Vector c(2);
  c[0] = bounds_.lo[0] + (static_cast<double>(i) + 0.5) * (bounds_.hi[0] - bounds_.lo[0]) / static_cast<double>(res_);
  c[1] = bounds_.lo[1] + (static_cast<double>(j) + 0.5) * (bounds_.hi[1] - bounds_.lo[1]) / static_cast<double>(res_);
  return c;
}

Vector GridOracle::mean() const {
  Vector m = Vector::Zero(2);
  for (std::size_t i = 0; i < res_; ++i) {
    for (std::size_t j = 0; j < res_; ++j) {
      m += mass_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * cell_center(i, j);
    }
  }
  return m;
}

Matrix GridOracle::covariance() const {
  const Vector m = mean();
  Matrix c = Matrix::Zero(2, 2);
  for (std::size_t i = 0; i < res_; ++i) {
    for (std::size_t j = 0; j < res_; ++j) {
      const Vector r = cell_center(i, j) - m;
      c += mass_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * (r * r.transpose());
    }
  }
  return c;
}

Matrix GridOracle::histogram(std::size_t bins) const {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(bins), static_cast<Eigen::Index>(bins));
  for (std::size_t i = 0; i < res_; ++i) {
    const auto bi = static_cast<Eigen::Index>(std::min(bins - 1, i * bins / res_));
    for (std::size_t j = 0; j < res_; ++j) {
      const auto bj = static_cast<Eigen::Index>(std::min(bins - 1, j * bins / res_));
      h(bi, bj) += mass_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return h;
}

GridOracle build_grid_oracle(const models::LatentVariableModel& model, const Vector& x, GridBounds bounds,
                             std::size_t resolution) {
  if (model.latent_dim() != 2) throw DimensionError("grid oracle needs a two-dimensional latent");
  ad::FreezeGuard freeze(model.parameters());
  auto logp = [&](const Matrix& z) -> Vector { return -model.potential_grid(x, z); };
  return GridOracle(logp, bounds, resolution);
}

GridOracle gaussian_grid(const GaussianMoments& g, std::size_t resolution) {
  const models::GaussianPrior density(g.mean, g.covariance);
  auto logp = [&](const Matrix& z) -> Vector {
    Vector out(z.rows());
    for (Eigen::Index k = 0; k < z.rows(); ++k) out[k] = density.log_density(Vector(z.row(k).transpose()));
    return out;
  };
  return GridOracle(logp, GridBounds::around(g.mean, g.covariance), resolution);
}

}  // namespace lae::harness
