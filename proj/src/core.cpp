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

#include "velcone/core.hpp"

#include <cmath>
#include <stdexcept>

#include "velcone/polyproj.hpp"

namespace velcone {

double Problem::constraint(const Vector& x, Index i) const {
  Vector g;
  constraints(x, g);
  return g(i);
}

FunctionProblem::FunctionProblem(Index n, Index n_g, ObjectiveFn f,
                                 ConstraintsFn g, ConstraintGradFn dg,
                                 std::vector<double> smoothness)
    : n_(n),
      n_g_(n_g),
      f_(std::move(f)),
      g_(std::move(g)),
      dg_(std::move(dg)),
      smoothness_(std::move(smoothness)) {
  if (n <= 0) throw std::invalid_argument("FunctionProblem: n must be positive");
  if (n_g < 0) throw std::invalid_argument("FunctionProblem: negative n_g");
  if (!f_) throw std::invalid_argument("FunctionProblem: missing objective");
  if (n_g > 0 && (!g_ || !dg_))
    throw std::invalid_argument("FunctionProblem: missing constraint oracle");
  if (!smoothness_.empty() && static_cast<Index>(smoothness_.size()) != n_g)
    throw std::invalid_argument("FunctionProblem: smoothness size != n_g");
}

double FunctionProblem::objective(const Vector& x, Vector* grad) const {
  double value = f_(x, grad);
  if (grad && grad->size() != n_)
    throw std::runtime_error("FunctionProblem: gradient has wrong length");
  return value;
}

void FunctionProblem::constraints(const Vector& x, Vector& g) const {
  if (n_g_ == 0) {
    g.resize(0);
    return;
  }
  g_(x, g);
  if (g.size() != n_g_)
    throw std::runtime_error("FunctionProblem: constraint oracle returned " +
                             std::to_string(g.size()) + " values, expected " +
                             std::to_string(n_g_));
}

void FunctionProblem::constraint_gradient(const Vector& x, Index i,
                                          Vector& row) const {
  dg_(x, i, row);
  if (row.size() != n_)
    throw std::runtime_error("FunctionProblem: gradient row has wrong length");
}

double FunctionProblem::constraint_smoothness(Index i) const {
  if (smoothness_.empty()) return std::numeric_limits<double>::infinity();
  return smoothness_[static_cast<std::size_t>(i)];
}

QuadraticProblem::QuadraticProblem(Matrix Q, Vector c, Matrix G, Vector h)
    : Q_(std::move(Q)), c_(std::move(c)), G_(std::move(G)), h_(std::move(h)) {
  if (Q_.rows() != Q_.cols() || Q_.rows() == 0)
    throw std::invalid_argument("QuadraticProblem: Q must be square");
  if (c_.size() != Q_.rows())
    throw std::invalid_argument("QuadraticProblem: c has wrong length");
  if (G_.rows() > 0 && G_.cols() != Q_.rows())
    throw std::invalid_argument("QuadraticProblem: G has wrong column count");
  if (G_.rows() == 0) G_.resize(0, Q_.rows());
  if (h_.size() != G_.rows())
    throw std::invalid_argument("QuadraticProblem: h has wrong length");
}

double QuadraticProblem::objective(const Vector& x, Vector* grad) const {
  Vector Qx = Q_ * x;
  if (grad) *grad = Qx + c_;
  return 0.5 * x.dot(Qx) + c_.dot(x);
}

void QuadraticProblem::constraints(const Vector& x, Vector& g) const {
  g = G_ * x - h_;
}

void QuadraticProblem::constraint_gradient(const Vector&, Index i,
                                           Vector& row) const {
  row = G_.row(i).transpose();
}

void SolverParams::validate() const {
  if (!(eps_restitution >= 0.0 && eps_restitution < 1.0))
    throw std::invalid_argument("restitution coefficient must lie in [0, 1)");
  if (!(eps_const >= 0.0))
    throw std::invalid_argument("activation tolerance must be nonnegative");
  if (const auto* c = std::get_if<ConstantStep>(&schedule)) {
    if (!(c->T > 0.0)) throw std::invalid_argument("step size must be positive");
  } else {
    const auto& d = std::get<DiminishingStep>(schedule);
    if (!(d.T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
    // s = 1 is accepted; the stationarity guarantee covers s < 1 only.
    if (!(d.s > 0.5 && d.s <= 1.0))
      throw std::invalid_argument("diminishing exponent must lie in (1/2, 1]");
  }
  switch (kind) {
    case ScheduleKind::kManual:
      if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
      if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
      if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
      break;
    case ScheduleKind::kHeavyBall:
    case ScheduleKind::kNesterovConstant:
      if (!(mu > 0.0 && mu <= 1.0))
        throw std::invalid_argument("mu must lie in (0, 1]; normalize by L");
      break;
    case ScheduleKind::kNesterovVarying:
      break;
  }
}

double constraint_velocity(const Problem& problem, const Vector& x,
                           const Vector& u, Index i, double alpha) {
  if (i < 0 || i >= problem.num_constraints())
    throw std::out_of_range("constraint index out of range");
  Vector row;
  problem.constraint_gradient(x, i, row);
  return row.dot(u) + alpha * problem.constraint(x, i);
}

VelocityCone build_local_cone(const Problem& problem, const IterateState& state,
                              const StepParams& params) {
  const Index n = problem.dim();
  Vector g;
  problem.constraints(state.x, g);

  std::vector<Index> picked;
  for (Index i = 0; i < g.size(); ++i)
    if (g(i) <= params.eps_const) picked.push_back(i);

  VelocityCone cone;
  const auto m = static_cast<Index>(picked.size());
  cone.rows.resize(m, n);
  cone.rhs.resize(m);
  cone.source = picked;
  Vector row;
  for (Index j = 0; j < m; ++j) {
    const Index i = picked[static_cast<std::size_t>(j)];
    problem.constraint_gradient(state.x, i, row);
    const double gamma = row.dot(state.u) + params.alpha * g(i);
    cone.rows.row(j) = row.transpose();
    cone.rhs(j) = -params.alpha * g(i) -
                  params.eps_restitution * std::min(gamma, 0.0);
  }
  return cone;
}

VelocityCone build_global_cone(const Problem& problem, const IterateState& state,
                               const StepParams& params) {
  const Index n = problem.dim();
  const Index n_g = problem.num_constraints();
  const Vector shift = params.beta * state.u;
  const Vector y = state.x + shift;

  Vector gx, gy;
  problem.constraints(state.x, gx);
  problem.constraints(y, gy);

  VelocityCone cone;
  cone.rows.resize(n_g, n);
  cone.rhs.resize(n_g);
  cone.source.resize(static_cast<std::size_t>(n_g));
  Vector row;
  for (Index i = 0; i < n_g; ++i) {
    problem.constraint_gradient(y, i, row);
    cone.rows.row(i) = row.transpose();
    const double curvature = (gy(i) - gx(i) - row.dot(shift)) / state.T;
    cone.rhs(i) = -params.alpha * gx(i) - curvature;
    cone.source[static_cast<std::size_t>(i)] = i;
  }
  return cone;
}

VelocityCone build_full_cone(const Problem& problem, const Vector& x,
                             double alpha) {
  const Index n = problem.dim();
  const Index n_g = problem.num_constraints();
  Vector g;
  problem.constraints(x, g);
  VelocityCone cone;
  cone.rows.resize(n_g, n);
  cone.rhs = -alpha * g;
  cone.source.resize(static_cast<std::size_t>(n_g));
  Vector row;
  for (Index i = 0; i < n_g; ++i) {
    problem.constraint_gradient(x, i, row);
    cone.rows.row(i) = row.transpose();
    cone.source[static_cast<std::size_t>(i)] = i;
  }
  return cone;
}

TableCoefficients schedule_params_at(ScheduleKind kind, double t, double mu) {
  switch (kind) {
    case ScheduleKind::kHeavyBall: {
      if (!(mu > 0.0 && mu <= 1.0))
        throw std::invalid_argument("mu must lie in (0, 1]; normalize by L");
      const double s = std::sqrt(mu);
      return {s, s, 0.0};
    }
    case ScheduleKind::kNesterovConstant: {
      if (!(mu > 0.0 && mu <= 1.0))
        throw std::invalid_argument("mu must lie in (0, 1]; normalize by L");
      const double s = std::sqrt(mu);
      return {s - mu / 2.0, s / (1.0 + s), (1.0 - s) / (1.0 + s)};
    }
    case ScheduleKind::kNesterovVarying:
      if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
      return {2.0 / (t + 3.0), 3.0 / (2.0 * (t + 3.0)), t / (t + 3.0)};
    case ScheduleKind::kManual:
      break;
  }
  throw std::invalid_argument("manual schedule has no table entry");
}

TableCoefficients schedule_params(ScheduleKind kind, long k, double mu,
                                  double T) {
  if (k < 0) throw std::invalid_argument("iteration must be nonnegative");
  return schedule_params_at(kind, static_cast<double>(k) * T, mu);
}

double step_size(const StepSchedule& schedule, long k) {
  if (const auto* c = std::get_if<ConstantStep>(&schedule)) return c->T;
  const auto& d = std::get<DiminishingStep>(schedule);
  return d.T0 / std::pow(static_cast<double>(k + 1), d.s);
}

StepParams resolve_step(const SolverParams& params, long k, double T,
                        double elapsed) {
  StepParams out;
  out.eps_restitution = params.eps_restitution;
  out.eps_const = params.eps_const;
  switch (params.kind) {
    case ScheduleKind::kManual:
      out.alpha = params.alpha;
      out.delta = params.delta;
      out.beta = params.beta;
      break;
    case ScheduleKind::kHeavyBall: {
      auto c = schedule_params_at(params.kind, 0.0, params.mu);
      out.alpha = c.alpha;
      out.delta = c.delta;
      out.beta = 0.0;
      break;
    }
    case ScheduleKind::kNesterovConstant:
    case ScheduleKind::kNesterovVarying: {
      const double t = params.clock == ScheduleClock::kScaled
                           ? elapsed
                           : static_cast<double>(k);
      auto c = schedule_params_at(params.kind, t, params.mu);
      out.alpha = c.alpha;
      out.delta = c.delta;
      out.beta = discrete_beta(c.delta, T);
      break;
    }
  }
  return out;
}

StationarityResult stationarity_residual(const Problem& problem, const Vector& x,
                                         double eps_const) {
  Vector grad;
  problem.objective(x, &grad);
  Vector g;
  problem.constraints(x, g);

  StationarityResult out;
  out.multipliers = Vector::Zero(problem.num_constraints());

  // min_{λ>=0} |∇f − Gᵀλ| is the projection of −∇f onto {v : G v >= 0}:
  // v = −∇f + GᵀΛ, so |v| is the residual and Λ the multipliers.
  VelocityCone cone;
  std::vector<Index> picked;
  for (Index i = 0; i < g.size(); ++i)
    if (g(i) <= eps_const) picked.push_back(i);
  const auto m = static_cast<Index>(picked.size());
  cone.rows.resize(m, problem.dim());
  cone.rhs = Vector::Zero(m);
  cone.source = picked;
  Vector row;
  for (Index j = 0; j < m; ++j) {
    problem.constraint_gradient(x, picked[static_cast<std::size_t>(j)], row);
    cone.rows.row(j) = row.transpose();
  }
  if (m == 0) {
    out.residual = grad.norm();
    return out;
  }
  ProjectionResult proj = project(-grad, cone, 1e-10);
  out.residual = proj.v.norm();
  for (Index j = 0; j < m; ++j)
    out.multipliers(picked[static_cast<std::size_t>(j)]) = proj.multipliers(j);
  for (Index j : proj.active) out.active.push_back(picked[static_cast<std::size_t>(j)]);
  return out;
}

double lagrangian(const Problem& problem, const Vector& x,
                  const Vector& multipliers) {
  Vector g;
  problem.constraints(x, g);
  return problem.objective(x, nullptr) - multipliers.dot(g);
}

}  // namespace velcone
