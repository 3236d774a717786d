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

#include "lae/trainers/elbo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lae/autodiff/numerics.hpp"
#include "lae/common/error.hpp"

namespace lae::trainers {

Matrix GaussianBatch::sample(Rng& rng, Vector& log_q) const {
  const Eigen::Index n = mean.rows(), d = mean.cols();
  Matrix z(n, d);
  log_q.resize(n);
  Vector e(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) e[k] = rng.normal();
    if (covariance) {
      z.row(i) = mean.row(i) + covariance->correlate(e).transpose();
      log_q[i] = -0.5 * (static_cast<double>(d) * numerics::kLog2Pi + covariance->log_det() + e.squaredNorm());
    } else {
      z.row(i) = mean.row(i).array() + stddev.row(i).array() * e.transpose().array();
      log_q[i] = -0.5 * (static_cast<double>(d) * numerics::kLog2Pi + e.squaredNorm()) -
                 stddev.row(i).array().log().sum();
    }
  }
  return z;
}

EncoderProposal::EncoderProposal(const encoder::AmortizedEncoder& enc, double sigma)
    : enc_(enc), sigma_(sigma) {
  if (!(sigma > 0.0)) throw ConfigError("proposal sigma must be positive");
}

GaussianBatch EncoderProposal::condition(const Matrix& x) const {
  ad::FreezeGuard freeze(enc_.parameters());
  GaussianBatch b;
  b.mean = enc_.encode(x).to_matrix();
  b.stddev = Matrix::Constant(b.mean.rows(), b.mean.cols(), sigma_);
  return b;
}

GaussianBatch VariationalProposal::condition(const Matrix& x) const {
  ad::FreezeGuard freeze(venc_.parameters());
  const auto q = venc_.forward(x);
  GaussianBatch b;
  b.mean = q.mean.to_matrix();
  b.stddev = (0.5 * q.logvar.to_matrix().array()).exp().matrix();
  return b;
}

namespace {

// log p(x_i, z_i) per row; NaN marks rows that could not be evaluated.
Vector log_joint_rows(const models::LatentVariableModel& model, const Matrix& x, const Matrix& z) {
  try {
    return Eigen::Map<const Vector>(model.log_joint(x, ad::Tensor::constant(z)).values().data(), z.rows());
  } catch (const NumericError&) {
  }
  Vector out(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    try {
      out[i] = model.log_joint(Matrix(x.row(i)), ad::Tensor::constant(Matrix(z.row(i)))).item();
    } catch (const NumericError&) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace

ElboEstimate evaluate_elbo(const models::LatentVariableModel& model, const Proposal& proposal,
                           const Matrix& data, std::size_t samples, Rng& rng, std::size_t chunk) {
  if (samples == 0) throw ConfigError("ELBO needs at least one sample per datapoint");
  if (data.rows() == 0) throw DimensionError("ELBO on an empty dataset");
  if (chunk == 0) chunk = static_cast<std::size_t>(data.rows());
  ad::FreezeGuard freeze(model.parameters());

  ElboEstimate est;
  est.degenerate_proposal = proposal.degenerate();
  std::vector<double> per_point;
  per_point.reserve(static_cast<std::size_t>(data.rows()));

  for (Eigen::Index start = 0; start < data.rows(); start += static_cast<Eigen::Index>(chunk)) {
    const Eigen::Index len = std::min<Eigen::Index>(static_cast<Eigen::Index>(chunk), data.rows() - start);
    const Matrix x = data.middleRows(start, len);
    const GaussianBatch q = proposal.condition(x);
    Vector total = Vector::Zero(len);
    std::vector<std::size_t> kept(static_cast<std::size_t>(len), 0);
    Vector log_q;
    for (std::size_t k = 0; k < samples; ++k) {
      const Matrix z = q.sample(rng, log_q);
      const Vector lj = log_joint_rows(model, x, z);
      for (Eigen::Index i = 0; i < len; ++i) {
        const double term = lj[i] - log_q[i];
        if (std::isfinite(term)) {
          total[i] += term;
          ++kept[static_cast<std::size_t>(i)];
        } else {
          ++est.skipped;
        }
      }
    }
    for (Eigen::Index i = 0; i < len; ++i) {
      const std::size_t kk = kept[static_cast<std::size_t>(i)];
      if (kk > 0) per_point.push_back(total[i] / static_cast<double>(kk));
    }
  }

  const std::size_t terms = static_cast<std::size_t>(data.rows()) * samples;
  est.evaluated = terms - est.skipped;
  if (static_cast<double>(est.skipped) > 0.01 * static_cast<double>(terms)) {
    throw NumericError("ELBO: " + std::to_string(est.skipped) + " of " + std::to_string(terms) +
                       " terms were non-finite");
  }
  const double d_x = static_cast<double>(model.data_dim());
  const Eigen::Map<const Vector> e(per_point.data(), static_cast<Eigen::Index>(per_point.size()));
  const double m = e.mean();
  est.neg_elbo_per_dim = -m / d_x;
  if (e.size() > 1) {
    const double var = (e.array() - m).square().sum() / static_cast<double>(e.size() - 1);
    est.stderr_per_dim = std::sqrt(var / static_cast<double>(e.size())) / d_x;
  }
  return est;
}

}  // namespace lae::trainers
