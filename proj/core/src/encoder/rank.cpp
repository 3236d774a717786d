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

#include <Eigen/SVD>

#include "lae/common/error.hpp"
#include "lae/encoder/encoder.hpp"

namespace lae::encoder {

RankDiagnostic rank_diagnostic(const Matrix& g, double tol) {
  if (!(tol > 0.0)) throw ContractError("rank_diagnostic: tolerance must be positive");
  RankDiagnostic out;
  if (g.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(g)};
  const auto& s = svd.singularValues();
  const double cutoff = tol * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++out.rank;
  }
  out.satisfied = out.rank == static_cast<std::size_t>(g.rows());
  return out;
}

}  // namespace lae::encoder
