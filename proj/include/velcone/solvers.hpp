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

#ifndef VELCONE_SOLVERS_HPP
#define VELCONE_SOLVERS_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "velcone/core.hpp"
#include "velcone/polyproj.hpp"

namespace velcone {

enum class Method { kCgd, kAgdLocal, kAgdGlobal };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

enum class TerminalStatus { kConverged, kMaxIter, kInfeasibleCone };

std::string_view to_string(TerminalStatus status);

struct TraceRecord {
  long k = 0;
  double T = 0.0;
  double fx = 0.0;
  double min_g = 0.0;
  double unorm = 0.0;
  /// NaN on iterations where the residual was not evaluated.
  double kkt = 0.0;
  Index active = 0;
  double elapsed_s = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  TerminalStatus status = TerminalStatus::kMaxIter;
  IterateState final_state;
  std::string message;
};

struct StoppingRule {
  long max_iter = 100000;
  double u_tol = 1e-9;
  double kkt_tol = 1e-7;
  /// Evaluate the stationarity residual every `kkt_stride` iterations (and
  /// whenever |u| <= u_tol).
  int kkt_stride = 10;
  /// Activation tolerance used by the stopping test's stationarity residual.
  double active_tol = 1e-8;
  /// Convergence also needs min_i g_i(x) >= −feas_tol.
  double feas_tol = 1e-8;

  void validate() const;
};

/// What a single step saw: the resolved coefficients, the cone it projected
/// onto and the projection certificate.
struct StepReport {
  StepParams params;
  VelocityCone cone;
  ProjectionResult projection;
  /// Point the cone rows were evaluated at (x_k, or y_k for the global scheme).
  Vector anchor;
};

/// Gradient descent with velocity projection: v = proj(−∇f(x), V_α(x)) over
/// all constraints, x⁺ = x + T v. Requires α T <= 1.
IterateState cgd_step(const Problem& problem, const IterateState& state,
                      const StepParams& params, StepReport* report = nullptr);

/// Momentum step with the local cone (violated constraints and restitution).
IterateState agd_local_step(const Problem& problem, const IterateState& state,
                            const StepParams& params,
                            StepReport* report = nullptr);

/// Momentum step with the global, curvature-corrected cone over all
/// constraints evaluated at y = x + βu.
IterateState agd_global_step(const Problem& problem, const IterateState& state,
                             const StepParams& params,
                             StepReport* report = nullptr);

IterateState step(Method method, const Problem& problem,
                  const IterateState& state, const StepParams& params,
                  StepReport* report = nullptr);

using StepObserver = std::function<void(const IterateState& before,
                                        const IterateState& after,
                                        const StepReport& report)>;

/// Iterates `method` from (x0, u0) until |u_k| <= u_tol and the stationarity
/// residual is <= kkt_tol, or max_iter steps. One record per iterate x_k,
/// k = 0, 1, ...; an empty cone failure ends the run with
/// TerminalStatus::kInfeasibleCone and the partial trace.
Trace run(const Problem& problem, Method method, const SolverParams& params,
          const StoppingRule& stop, const Vector& x0,
          const std::optional<Vector>& u0 = std::nullopt,
          const StepObserver& observer = {});

/// L + B L_g / ε: Lagrangian smoothness surrogate when no multiplier bound
/// is known. Throws std::invalid_argument unless all inputs are positive
/// (L_g = 0 is accepted).
double effective_smoothness(double L, double B, double L_g, double eps);

/// Largest amount by which the step's cone rows are violated by u_{k+1}.
/// For the local scheme this is the impact law
/// γ_i(x_k,u_{k+1}) >= −ε min{γ_i(x_k,u_k), 0}.
double cone_violation(const StepReport& report, const IterateState& after);

/// Smallest margin of g_i(x_{k+1}) >= (1 − αT) g_i(x_k) − L_gi |x_{k+1} − a|²/2
/// over constraints with g_i(x_k) < 0, where a is the step's anchor.
/// Positive when the bound holds; +inf when no constraint is violated.
double feasibility_decay_margin(const Problem& problem,
                                const IterateState& before,
                                const IterateState& after,
                                const StepReport& report);

/// Lyapunov function of the accelerated global scheme in units where the
/// Lagrangian smoothness and step size are one:
/// ½|δ̃(x − x*) + (1 − δ̃) T u|² + (l(x) − l*)/L_l with δ̃ = δT.
double accelerated_lyapunov(const Vector& x, const Vector& u,
                            const Vector& x_star, double lagrangian_gap,
                            double delta, double T, double L_l);

/// Least-squares slope of log(value) against log(k) over records with
/// k in [k_min, k_max] and value > 0. Returns NaN with fewer than two points.
double loglog_slope(const std::vector<long>& ks, const std::vector<double>& values,
                    long k_min, long k_max);

}  // namespace velcone

#endif  // VELCONE_SOLVERS_HPP
