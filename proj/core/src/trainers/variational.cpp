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

#include "lae/trainers/variational.hpp"

#include "lae/autodiff/numerics.hpp"
#include "lae/autodiff/ops.hpp"
#include "lae/common/error.hpp"

namespace lae::trainers {

namespace {

ad::MlpSpec trunk_spec(ad::MlpSpec spec) {
  if (spec.sizes.size() < 2) throw ConfigError("variational encoder trunk needs at least one layer");
  spec.output_activation = spec.hidden_activation;
  return spec;
}

}  // namespace

GaussianVariationalEncoder::GaussianVariationalEncoder(ad::MlpSpec trunk, std::size_t latent_dim, Rng& rng)
    : trunk_(trunk_spec(std::move(trunk)), rng),
      mean_head_(trunk_.output_dim(), latent_dim, true, trunk_.spec().init, rng),
      logvar_head_(trunk_.output_dim(), latent_dim, true, ad::InitSpec{ad::InitSpec::Kind::kNormal, 1e-3, 0.0}, rng),
      latent_dim_(latent_dim) {}

GaussianVariationalEncoder::Output GaussianVariationalEncoder::forward(const Matrix& x) const {
  ad::Tensor h = trunk_.forward(ad::Tensor::constant(x));
  return {mean_head_.forward(h), logvar_head_.forward(h)};
}

ad::Tensor GaussianVariationalEncoder::reparameterize(const Output& q, const Matrix& eps) {
  ad::Tensor std = ad::exp(ad::scale(q.logvar, 0.5));
  return ad::add(q.mean, ad::mul(std, ad::Tensor::constant(eps)));
}

ad::Tensor GaussianVariationalEncoder::log_density(const Output& q, const ad::Tensor& z) {
  ad::Tensor diff = ad::sub(z, q.mean);
  ad::Tensor quad = ad::mul(ad::square(diff), ad::exp(ad::scale(q.logvar, -1.0)));
  ad::Tensor per = ad::add_scalar(ad::add(q.logvar, quad), numerics::kLog2Pi);
  return ad::scale(ad::sum_rows(per), -0.5);
}

std::vector<ad::NamedTensor> GaussianVariationalEncoder::parameters() const {
  auto out = trunk_.parameters("venc.trunk");
  mean_head_.collect("venc.mean", out);
  logvar_head_.collect("venc.logvar", out);
  return out;
}

Vector gaussian_kl_standard(const Matrix& mean, const Matrix& logvar) {
  return 0.5 * (mean.array().square() + logvar.array().exp() - logvar.array() - 1.0).rowwise().sum();
}

}  // namespace lae::trainers
