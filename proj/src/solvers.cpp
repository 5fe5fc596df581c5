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

#include "velcone/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace velcone {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_state(const Problem& problem, const IterateState& state) {
  if (state.x.size() != problem.dim() || state.u.size() != problem.dim())
    throw std::invalid_argument("iterate has the wrong dimension");
  if (!(state.T > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!state.x.allFinite() || !state.u.allFinite())
    throw std::invalid_argument("iterate is not finite");
}

// r = u − 2δT u − T ∇f(x + βu)
Vector momentum_target(const Problem& problem, const IterateState& state,
                       const StepParams& params, Vector* anchor) {
  Vector y = state.x + params.beta * state.u;
  Vector grad;
  problem.objective(y, &grad);
  Vector r = (1.0 - 2.0 * params.delta * state.T) * state.u - state.T * grad;
  if (anchor) *anchor = std::move(y);
  return r;
}

IterateState advance(const IterateState& state, Vector velocity) {
  IterateState next;
  next.x = state.x + state.T * velocity;
  next.u = std::move(velocity);
  next.k = state.k + 1;
  next.T = state.T;
  return next;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kCgd: return "cgd";
    case Method::kAgdLocal: return "agd_local";
    case Method::kAgdGlobal: return "agd_global";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "cgd") return Method::kCgd;
  if (name == "agd_local") return Method::kAgdLocal;
  if (name == "agd_global") return Method::kAgdGlobal;
  return std::nullopt;
}

std::string_view to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::kConverged: return "converged";
    case TerminalStatus::kMaxIter: return "max_iter";
    case TerminalStatus::kInfeasibleCone: return "infeasible_cone";
  }
  return "?";
}

void StoppingRule::validate() const {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(u_tol >= 0.0) || !(kkt_tol >= 0.0) || !(feas_tol >= 0.0))
    throw std::invalid_argument("stopping tolerances must be nonnegative");
  if (kkt_stride < 1) throw std::invalid_argument("kkt_stride must be >= 1");
}

IterateState cgd_step(const Problem& problem, const IterateState& state,
                      const StepParams& params, StepReport* report) {
  check_state(problem, state);
  if (params.alpha * state.T > 1.0 + 1e-12)
    throw std::invalid_argument("cgd requires alpha * T <= 1");
  Vector grad;
  problem.objective(state.x, &grad);
  VelocityCone cone = build_full_cone(problem, state.x, params.alpha);
  ProjectionResult proj = project(-grad, cone);
  IterateState next = advance(state, proj.v);
  if (report) {
    report->params = params;
    report->cone = std::move(cone);
    report->projection = std::move(proj);
    report->anchor = state.x;
  }
  return next;
}

IterateState agd_local_step(const Problem& problem, const IterateState& state,
                            const StepParams& params, StepReport* report) {
  check_state(problem, state);
  Vector r = momentum_target(problem, state, params, nullptr);
  VelocityCone cone = build_local_cone(problem, state, params);
  ProjectionResult proj = project(r, cone);
  IterateState next = advance(state, proj.v);
  if (report) {
    report->params = params;
    report->cone = std::move(cone);
    report->projection = std::move(proj);
    report->anchor = state.x;
  }
  return next;
}

IterateState agd_global_step(const Problem& problem, const IterateState& state,
                             const StepParams& params, StepReport* report) {
  check_state(problem, state);
  Vector y;
  Vector r = momentum_target(problem, state, params, &y);
  VelocityCone cone = build_global_cone(problem, state, params);
  ProjectionResult proj = project(r, cone);
  IterateState next = advance(state, proj.v);
  if (report) {
    report->params = params;
    report->cone = std::move(cone);
    report->projection = std::move(proj);
    report->anchor = std::move(y);
  }
  return next;
}

IterateState step(Method method, const Problem& problem,
                  const IterateState& state, const StepParams& params,
                  StepReport* report) {
  switch (method) {
    case Method::kCgd: return cgd_step(problem, state, params, report);
    case Method::kAgdLocal: return agd_local_step(problem, state, params, report);
    case Method::kAgdGlobal: return agd_global_step(problem, state, params, report);
  }
  throw std::invalid_argument("unknown method");
}

Trace run(const Problem& problem, Method method, const SolverParams& params,
          const StoppingRule& stop, const Vector& x0,
          const std::optional<Vector>& u0, const StepObserver& observer) {
  params.validate();
  stop.validate();
  const Index n = problem.dim();
  if (x0.size() != n) throw std::invalid_argument("x0 has the wrong dimension");
  if (u0 && u0->size() != n) throw std::invalid_argument("u0 has the wrong dimension");

  const auto start = std::chrono::steady_clock::now();
  const auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  Trace trace;
  IterateState state;
  state.x = x0;
  state.u = u0 ? *u0 : Vector::Zero(n);
  state.k = 0;
  state.T = step_size(params.schedule, 0);
  double elapsed_time = 0.0;  // Σ T_j, the schedule clock
  Index last_active = 0;
  Vector g;
  StepReport report;

  for (;;) {
    TraceRecord rec;
    rec.k = state.k;
    rec.T = state.T;
    rec.fx = problem.objective(state.x, nullptr);
    problem.constraints(state.x, g);
    rec.min_g = g.size() ? g.minCoeff() : std::numeric_limits<double>::infinity();
    rec.unorm = state.u.norm();
    rec.active = last_active;
    const bool u_small = rec.unorm <= stop.u_tol;
    rec.kkt = kNaN;
    if (u_small || state.k % stop.kkt_stride == 0)
      rec.kkt = stationarity_residual(problem, state.x,
                                      std::max(params.eps_const, stop.active_tol))
                    .residual;
    rec.elapsed_s = seconds();
    trace.records.push_back(rec);

    if (u_small && rec.kkt <= stop.kkt_tol && rec.min_g >= -stop.feas_tol) {
      trace.status = TerminalStatus::kConverged;
      break;
    }
    if (state.k >= stop.max_iter) {
      trace.status = TerminalStatus::kMaxIter;
      break;
    }

    const StepParams sp = resolve_step(params, state.k, state.T, elapsed_time);
    IterateState next;
    try {
      next = step(method, problem, state, sp, &report);
    } catch (const InfeasibleConeError& e) {
      trace.status = TerminalStatus::kInfeasibleCone;
      trace.message = e.what();
      break;
    }
    last_active = static_cast<Index>(report.projection.active.size());
    if (observer) observer(state, next, report);
    elapsed_time += state.T;
    next.T = step_size(params.schedule, next.k);
    state = std::move(next);
  }
  trace.final_state = state;
  return trace;
}

double effective_smoothness(double L, double B, double L_g, double eps) {
  if (!(L > 0.0) || !(B > 0.0) || !(L_g >= 0.0))
    throw std::invalid_argument("effective_smoothness: L, B must be positive and L_g >= 0");
  if (!(eps > 0.0))
    throw std::invalid_argument("effective_smoothness: eps must be positive");
  return L + B * L_g / eps;
}

double cone_violation(const StepReport& report, const IterateState& after) {
  if (report.cone.empty()) return 0.0;
  const Vector slack = report.cone.rows * after.u - report.cone.rhs;
  return std::max(0.0, -slack.minCoeff());
}

double feasibility_decay_margin(const Problem& problem,
                                const IterateState& before,
                                const IterateState& after,
                                const StepReport& report) {
  Vector g0, g1;
  problem.constraints(before.x, g0);
  problem.constraints(after.x, g1);
  const double T = before.T;
  const double drift_sq = (after.x - report.anchor).squaredNorm();
  double margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < g0.size(); ++i) {
    if (!(g0(i) < 0.0)) continue;
    const double Lg = problem.constraint_smoothness(i);
    if (!std::isfinite(Lg)) continue;
    const double bound =
        (1.0 - report.params.alpha * T) * g0(i) - 0.5 * Lg * drift_sq;
    margin = std::min(margin, g1(i) - bound);
  }
  return margin;
}

double accelerated_lyapunov(const Vector& x, const Vector& u,
                            const Vector& x_star, double lagrangian_gap,
                            double delta, double T, double L_l) {
  const double dn = delta * T;
  const Vector mix = dn * (x - x_star) + (1.0 - dn) * T * u;
  return 0.5 * mix.squaredNorm() + lagrangian_gap / L_l;
}

double loglog_slope(const std::vector<long>& ks, const std::vector<double>& values,
                    long k_min, long k_max) {
  if (ks.size() != values.size())
    throw std::invalid_argument("loglog_slope: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < k_min || ks[i] > k_max || ks[i] <= 0 || !(values[i] > 0.0)) continue;
    const double lx = std::log(static_cast<double>(ks[i]));
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return kNaN;
  const double c = static_cast<double>(count);
  const double denom = c * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return (c * sxy - sx * sy) / denom;
}

}  // namespace velcone
