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


#ifndef VELCONE_TESTS_ORACLES_HPP
#define VELCONE_TESTS_ORACLES_HPP

// Slow reference implementations used only by tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "velcone/core.hpp"
#include "velcone/lpcs.hpp"
#include "velcone/polyproj.hpp"
#include "velcone/wsimplex.hpp"

namespace velcone::oracle {

/// Projection of r onto {v : Wv >= w} by trying every active set: for each
/// subset S solve the equality-constrained problem, keep candidates that are
/// primal feasible with nonnegative multipliers, return the closest one.
/// Returns nullopt when no subset qualifies (empty polyhedron).
inline std::optional<Vector> enumerate_projection(const Vector& r, const Matrix& W,
                                                  const Vector& w, double tol = 1e-9) {
  const Index m = W.rows();
  const Index n = r.size();
  std::optional<Vector> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<Index> S;
    for (Index i = 0; i < m; ++i)
      if (mask & (std::uint64_t{1} << i)) S.push_back(i);
    Vector v = r;
    Vector lambda;
    if (!S.empty()) {
      Matrix N(n, static_cast<Index>(S.size()));
      Vector ws(static_cast<Index>(S.size()));
      for (std::size_t j = 0; j < S.size(); ++j) {
        N.col(static_cast<Index>(j)) = W.row(S[j]).transpose();
        ws(static_cast<Index>(j)) = w(S[j]);
      }
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(N.transpose() * N);
      lambda = cod.solve(ws - N.transpose() * r);
      v = r + N * lambda;
      // Dependent rows: the solve may not hit every equality.
      if ((N.transpose() * v - ws).cwiseAbs().maxCoeff() > tol * (1.0 + ws.norm())) continue;
      if (lambda.minCoeff() < -tol) continue;
    }
    if (m > 0 && (W * v - w).minCoeff() < -tol * (1.0 + w.cwiseAbs().maxCoeff())) continue;
    const double d = (v - r).norm();
    if (d < best_dist) {
      best_dist = d;
      best = v;
    }
  }
  return best;
}

inline std::optional<Vector> enumerate_projection(const Vector& r, const VelocityCone& cone,
                                                  double tol = 1e-9) {
  return enumerate_projection(r, cone.rows, cone.rhs, tol);
}

/// Weighted-simplex instance as the polyhedron {ξ_i >= 0 (i ∈ I), −wᵀξ >= −ν̄}.
inline VelocityCone weighted_simplex_polyhedron(const WeightedSimplexInstance& inst) {
  const Index n = inst.q.size();
  std::vector<Index> rows;
  for (Index i = 0; i < n; ++i)
    if (inst.nonneg[static_cast<std::size_t>(i)]) rows.push_back(i);
  VelocityCone c;
  const Index k = static_cast<Index>(rows.size());
  c.rows = Matrix::Zero(k + 1, n);
  c.rhs = Vector::Zero(k + 1);
  for (Index j = 0; j < k; ++j) c.rows(j, rows[static_cast<std::size_t>(j)]) = 1.0;
  c.rows.row(k) = -inst.weights.transpose();
  c.rhs(k) = -inst.budget;
  return c;
}

/// Central difference (f(x + h) − f(x − h)) / 2h.
inline double central_difference(const std::function<double(double)>& f, double x,
                                  double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Gradient of a multivariate function by central differences.
inline Vector gradient_fd(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Dense QP min ½|v − r|² s.t. Wv >= w restated for the lifted compressed-
/// sensing step: the untransformed velocity problem assembled row by row
/// from the generic cone builders, solved by enumeration.
inline std::optional<Vector> lifted_step_oracle(const Problem& lifted, const IterateState& s,
                                                const StepParams& p, bool global) {
  Vector y = s.x + p.beta * s.u;
  Vector grad;
  lifted.objective(y, &grad);
  const Vector r = (1.0 - 2.0 * p.delta * s.T) * s.u - s.T * grad;
  const VelocityCone cone = global ? build_global_cone(lifted, s, p) : build_local_cone(lifted, s, p);
  return enumerate_projection(r, cone, 1e-10);
}

}  // namespace velcone::oracle

#endif  // VELCONE_TESTS_ORACLES_HPP
