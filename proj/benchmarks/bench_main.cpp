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

#include <benchmark/benchmark.h>

#include "lae/autodiff/ops.hpp"
#include "lae/encoder/encoder.hpp"
#include "lae/harness/conjugate_oracle.hpp"
#include "lae/harness/experiments.hpp"
#include "lae/models/likelihood.hpp"
#include "lae/samplers/ald.hpp"

namespace {

using namespace lae;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_MatmulBackward(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(1);
  ad::Tensor a = ad::Tensor::parameter(random_matrix(n, n, rng));
  ad::Tensor b = ad::Tensor::parameter(random_matrix(n, n, rng));
  for (auto _ : state) {
    a.zero_grad();
    b.zero_grad();
    ad::sum(ad::matmul(a, b)).backward();
    benchmark::DoNotOptimize(a.grad().data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_MatmulBackward)->Arg(32)->Arg(128)->Arg(256);

void BM_AldStepConjugate(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto model = harness::toy_conjugate_oracle().make_model();
  Rng rng(2);
  const Matrix x = harness::toy_observations(model, 3, rng);
  encoder::FeatureConfig fc;
  fc.feature_dim = d;
  encoder::AmortizedEncoder enc(encoder::make_features(fc, 2, rng), 2);
  Matrix g;
  {
    ad::FreezeGuard freeze(enc.psi_parameters());
    g = enc.features(x).to_matrix();
  }
  samplers::AmortizedTarget target(model, x, g);
  samplers::SamplerConfig cfg;
  auto chain = samplers::init_chain(target, samplers::flatten(enc.phi_matrix()), 1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(samplers::langevin_step(target, chain, cfg));
}
BENCHMARK(BM_AldStepConjugate)->Arg(3)->Arg(128);

void BM_DiscretizedLogistic(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(4);
  Matrix x(n, 784);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * static_cast<double>(rng.below(256)) / 255.0 - 1.0;
  ad::Tensor mu = ad::Tensor::parameter(Matrix(0.5 * random_matrix(n, 784, rng)));
  for (auto _ : state) {
    mu.zero_grad();
    ad::sum(models::discretized_logistic_log_likelihood(x, mu, ad::Tensor::scalar(-2.0))).backward();
    benchmark::DoNotOptimize(mu.grad().data());
  }
  state.SetItemsProcessed(state.iterations() * n * 784);
}
BENCHMARK(BM_DiscretizedLogistic)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
