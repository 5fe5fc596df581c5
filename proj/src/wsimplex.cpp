// Copyright 2026 The velcone Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "velcone/wsimplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace velcone {

Vector project_weighted_simplex(const WeightedSimplexInstance& inst) {
  const Index n = inst.q.size();
  if (inst.weights.size() != n || static_cast<Index>(inst.nonneg.size()) != n)
    throw std::invalid_argument("weighted simplex: size mismatch");
  for (Index i = 0; i < n; ++i)
    if (!(inst.weights(i) >= 0.0) || !std::isfinite(inst.weights(i)))
      throw std::invalid_argument("weighted simplex: weights must be finite and >= 0");
  const auto& q = inst.q;
  const auto& w = inst.weights;
  const auto in_set = [&](Index i) { return inst.nonneg[static_cast<std::size_t>(i)]; };

  // Candidate with the budget row inactive.
  Vector xi = q;
  for (Index i = 0; i < n; ++i)
    if (in_set(i) && q(i) < 0.0) xi(i) = 0.0;
  if (!(w.dot(xi) > inst.budget)) return xi;

  double base_wq = 0.0;  // Σ_{i∉I} w_i q_i
  double base_ww = 0.0;  // Σ_{i∉I} w_i²
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (!in_set(i)) {
      base_wq += w(i) * q(i);
      base_ww += w(i) * w(i);
    } else if (w(i) > 0.0) {
      order.push_back(i);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return q(a) / w(a) > q(b) / w(b);
  });

  double sum_wq = base_wq;
  double sum_ww = base_ww;
  for (Index s : order) {
    const double ratio = q(s) / w(s);
    if (sum_wq - sum_ww * ratio > inst.budget) break;
    sum_wq += w(s) * q(s);
    sum_ww += w(s) * w(s);
  }
  if (!(sum_ww > 0.0)) return xi;
  const double lambda = (sum_wq - inst.budget) / sum_ww;
  // The branch is only reached with the budget violated, so λ > 0 up to
  // rounding.
  if (!(lambda >= 0.0)) return xi;

  xi = q - lambda * w;
  for (Index i = 0; i < n; ++i)
    if (in_set(i) && xi(i) < 0.0) xi(i) = 0.0;
  return xi;
}

Vector project_l1_ball(const Vector& q, double nu) {
  if (!(nu >= 0.0)) throw std::invalid_argument("l1 ball radius must be >= 0");
  const Index n = q.size();
  WeightedSimplexInstance inst;
  inst.q.resize(2 * n);
  inst.q << q, -q;
  inst.nonneg.assign(static_cast<std::size_t>(2 * n), true);
  inst.weights = Vector::Ones(2 * n);
  inst.budget = nu;
  const Vector xi = project_weighted_simplex(inst);
  return xi.head(n) - xi.tail(n);
}

}  // namespace velcone
