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

#ifndef VELCONE_WSIMPLEX_HPP
#define VELCONE_WSIMPLEX_HPP

#include <vector>

#include "velcone/core.hpp"

namespace velcone {

/// {ξ : ξ_i >= 0 for i in I, wᵀξ <= budget} together with the point q.
struct WeightedSimplexInstance {
  Vector q;
  /// nonneg[i] marks i ∈ I.
  std::vector<bool> nonneg;
  Vector weights;
  double budget = 0.0;
};

/// Euclidean projection of q onto the weighted simplex.
///
/// One descending sort of the ratios q_i/w_i over I (stable, index order on
/// exact ties) followed by a linear scan for the budget multiplier, so the
/// cost is O(n log n). Coordinates in I with w_i = 0 are clamped only; those
/// outside I with w_i = 0 pass through unchanged.
///
/// Throws std::invalid_argument for negative or non-finite weights and for
/// mismatched sizes.
Vector project_weighted_simplex(const WeightedSimplexInstance& inst);

/// Projection onto {x : |x|_1 <= nu} via the 2n-dimensional unit-weight
/// simplex of the sign split (q, −q).
Vector project_l1_ball(const Vector& q, double nu);

}  // namespace velcone

#endif  // VELCONE_WSIMPLEX_HPP
