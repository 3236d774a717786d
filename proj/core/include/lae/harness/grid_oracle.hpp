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

#include <array>
#include <functional>

#include "lae/harness/conjugate_oracle.hpp"
#include "lae/models/model.hpp"

namespace lae::harness {

struct GridBounds {
  std::array<double, 2> lo{-1.0, -1.0};
  std::array<double, 2> hi{1.0, 1.0};

  /// Box of +-`width` marginal standard deviations around a Gaussian.
  static GridBounds around(const Vector& mean, const Matrix& cov, double width = 5.0);
  bool contains(double z0, double z1) const {
    return z0 >= lo[0] && z0 < hi[0] && z1 >= lo[1] && z1 < hi[1];
  }
};

inline constexpr std::size_t kDefaultGridResolution = 200;
inline constexpr std::size_t kDefaultHistogramBins = 50;

/// Normalized cell masses of a two-dimensional density tabulated at cell
/// centres.
class GridOracle {
 public:
  /// `log_density(z)` returns unnormalized log-densities for the rows of z.
  /// Throws DomainError if no cell has positive mass.
  GridOracle(const std::function<Vector(const Matrix&)>& log_density, GridBounds bounds,
             std::size_t resolution = kDefaultGridResolution);

  const GridBounds& bounds() const { return bounds_; }
  std::size_t resolution() const { return res_; }
  /// Cell masses, row index along z_0; sums to 1.
  const Matrix& mass() const { return mass_; }
  Vector cell_center(std::size_t i, std::size_t j) const;

  Vector mean() const;
  Matrix covariance() const;
  /// Mass per histogram bin over the same bounds; cells go to the bin that
  /// contains their centre.
  Matrix histogram(std::size_t bins = kDefaultHistogramBins) const;

 private:
  GridBounds bounds_;
  std::size_t res_;
  Matrix mass_;
};

/// Posterior p(z | x) of a model with a two-dimensional latent.
GridOracle build_grid_oracle(const models::LatentVariableModel& model, const Vector& x, GridBounds bounds,
                             std::size_t resolution = kDefaultGridResolution);

/// Grid tabulation of a Gaussian, used for histogram comparisons against a
/// closed form.
GridOracle gaussian_grid(const GaussianMoments& g, std::size_t resolution = kDefaultGridResolution);

}  // namespace lae::harness
