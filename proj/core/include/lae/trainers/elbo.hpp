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

#include <functional>
#include <optional>

#include "lae/encoder/encoder.hpp"
#include "lae/models/model.hpp"
#include "lae/trainers/variational.hpp"

namespace lae::trainers {

/// Gaussian proposals for a batch: either independent per-coordinate
/// deviations `stddev`, or one full covariance shared by every row.
struct GaussianBatch {
  Matrix mean;
  Matrix stddev;
  std::optional<models::CovarianceFactor> covariance;

  /// One draw per row; writes log q(z_i) into `log_q`.
  Matrix sample(Rng& rng, Vector& log_q) const;
};

class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual GaussianBatch condition(const Matrix& x) const = 0;
  /// True when the proposal is too narrow for a meaningful estimate.
  virtual bool degenerate() const { return false; }
};

inline constexpr double kMinProposalSigma = 1e-4;

/// q(z | x) = N(Phi g(x; psi), sigma^2 I).
class EncoderProposal final : public Proposal {
 public:
  EncoderProposal(const encoder::AmortizedEncoder& enc, double sigma);
  GaussianBatch condition(const Matrix& x) const override;
  bool degenerate() const override { return sigma_ < kMinProposalSigma; }

 private:
  const encoder::AmortizedEncoder& enc_;
  double sigma_;
};

class VariationalProposal final : public Proposal {
 public:
  explicit VariationalProposal(const GaussianVariationalEncoder& venc) : venc_(venc) {}
  GaussianBatch condition(const Matrix& x) const override;

 private:
  const GaussianVariationalEncoder& venc_;
};

class FunctionProposal final : public Proposal {
 public:
  explicit FunctionProposal(std::function<GaussianBatch(const Matrix&)> fn) : fn_(std::move(fn)) {}
  GaussianBatch condition(const Matrix& x) const override { return fn_(x); }

 private:
  std::function<GaussianBatch(const Matrix&)> fn_;
};

struct ElboEstimate {
  /// -(1/d_x) * mean_i (1/K) sum_k [log p(x_i, z_k) - log q(z_k | x_i)].
  double neg_elbo_per_dim = 0.0;
  /// Standard error of the above across datapoints.
  double stderr_per_dim = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  bool degenerate_proposal = false;
};

inline constexpr std::size_t kDefaultElboSamples = 16;
inline constexpr double kDefaultElboSigma = 0.05;

/// Monte-Carlo negative ELBO per data dimension. Non-finite terms are
/// skipped; more than 1% skipped raises NumericError.
ElboEstimate evaluate_elbo(const models::LatentVariableModel& model, const Proposal& proposal,
                           const Matrix& data, std::size_t samples, Rng& rng,
                           std::size_t chunk = 256);

}  // namespace lae::trainers
