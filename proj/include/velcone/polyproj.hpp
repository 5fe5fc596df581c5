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

#ifndef VELCONE_POLYPROJ_HPP
#define VELCONE_POLYPROJ_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "velcone/core.hpp"

namespace velcone {

/// No v satisfies W v >= w (the dual iterate diverged).
class InfeasibleConeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The active-set loop hit its iteration budget before the KKT certificate.
class MaxIterationsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solution of  min ½|v − r|²  s.t.  W v >= w.
///
/// Certificate: v = r + WᵀΛ, Λ >= 0, W v >= w − tol and Λ_i (W_i v − w_i) = 0.
/// R = WᵀΛ is the constraint force that bends r into the cone.
struct ProjectionResult {
  Vector v;
  Vector multipliers;
  std::vector<Index> active;
  int iterations = 0;
  /// Number of near-singular Gram pivots met while adding rows.
  int degenerate_pivots = 0;
};

inline constexpr double kDefaultProjectionTol = 1e-10;

/// Euclidean projection of r onto {v : W v >= w} by a dual active-set method.
///
/// Starts from the unconstrained minimizer v = r and adds the most violated
/// row (smallest index on ties) one at a time, dropping rows whose multiplier
/// would turn negative. The Cholesky factor of the active-row Gram matrix is
/// extended in O(k²) per added row and rebuilt after a drop.
///
/// Throws InfeasibleConeError when the cone is empty and MaxIterationsError
/// when the certificate is not reached.
ProjectionResult project(const Vector& r, const VelocityCone& cone,
                         double tol = kDefaultProjectionTol);

/// Closed form for a single half-space {v : rowᵀv >= rhs}. Throws
/// std::invalid_argument for a zero row.
ProjectionResult project_halfspace(const Vector& r, const Vector& row, double rhs);

/// Largest violation of the certificate above; used by tests and traces.
struct CertificateError {
  double primal = 0.0;         // max_i (w_i − W_i v)+
  double dual = 0.0;           // max_i (−Λ_i)+
  double stationarity = 0.0;   // |v − r − WᵀΛ|
  double complementarity = 0.0;  // max_i |Λ_i (W_i v − w_i)|
  double max() const;
};

CertificateError certificate_error(const Vector& r, const VelocityCone& cone,
                                   const ProjectionResult& result);

}  // namespace velcone

#endif  // VELCONE_POLYPROJ_HPP
