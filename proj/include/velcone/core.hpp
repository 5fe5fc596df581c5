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

#ifndef VELCONE_CORE_HPP
#define VELCONE_CORE_HPP

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace velcone {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Smooth inequality-constrained problem  min f(x)  s.t.  g_i(x) >= 0.
///
/// Constraint gradients are requested one row at a time so that solvers
/// touching only a few constraints per iteration never assemble the full
/// Jacobian. Implementations must be safe to call concurrently from several
/// threads (all methods are const and must not mutate shared state).
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Index dim() const = 0;
  virtual Index num_constraints() const = 0;

  /// Returns f(x); writes ∇f(x) into `grad` when non-null.
  virtual double objective(const Vector& x, Vector* grad) const = 0;

  /// Writes all constraint values g(x) into `g` (resized to n_g).
  virtual void constraints(const Vector& x, Vector& g) const = 0;

  /// Writes ∇g_i(x) into `row` (resized to n).
  virtual void constraint_gradient(const Vector& x, Index i,
                                   Vector& row) const = 0;

  /// Lipschitz constant of ∇g_i, or +inf when unknown. Only used by
  /// trace diagnostics (feasibility-decay bound).
  virtual double constraint_smoothness(Index /*i*/) const {
    return std::numeric_limits<double>::infinity();
  }

  double constraint(const Vector& x, Index i) const;
};

/// Problem assembled from callables, mainly for bindings and tests.
class FunctionProblem final : public Problem {
 public:
  using ObjectiveFn = std::function<double(const Vector&, Vector*)>;
  using ConstraintsFn = std::function<void(const Vector&, Vector&)>;
  using ConstraintGradFn = std::function<void(const Vector&, Index, Vector&)>;

  FunctionProblem(Index n, Index n_g, ObjectiveFn f, ConstraintsFn g,
                  ConstraintGradFn dg, std::vector<double> smoothness = {});

  Index dim() const override { return n_; }
  Index num_constraints() const override { return n_g_; }
  double objective(const Vector& x, Vector* grad) const override;
  void constraints(const Vector& x, Vector& g) const override;
  void constraint_gradient(const Vector& x, Index i,
                           Vector& row) const override;
  double constraint_smoothness(Index i) const override;

 private:
  Index n_;
  Index n_g_;
  ObjectiveFn f_;
  ConstraintsFn g_;
  ConstraintGradFn dg_;
  std::vector<double> smoothness_;
};

/// f(x) = ½ xᵀQx + cᵀx,  g(x) = Gx − h  (affine constraints, L_g = 0).
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(Matrix Q, Vector c, Matrix G, Vector h);

  Index dim() const override { return Q_.rows(); }
  Index num_constraints() const override { return G_.rows(); }
  double objective(const Vector& x, Vector* grad) const override;
  void constraints(const Vector& x, Vector& g) const override;
  void constraint_gradient(const Vector& x, Index i,
                           Vector& row) const override;
  double constraint_smoothness(Index) const override { return 0.0; }

  const Matrix& hessian() const { return Q_; }
  const Vector& linear() const { return c_; }
  const Matrix& constraint_matrix() const { return G_; }
  const Vector& constraint_offset() const { return h_; }

 private:
  Matrix Q_;
  Vector c_;
  Matrix G_;
  Vector h_;
};

/// Position, momentum, iteration counter and the step size T_k in use.
struct IterateState {
  Vector x;
  Vector u;
  long k = 0;
  double T = 1.0;
};

struct ConstantStep {
  double T = 1.0;
};

/// T_k = T0 / (k+1)^s for the 0-based iteration k, so the first step uses T0.
struct DiminishingStep {
  double T0 = 1.0;
  double s = 0.75;
};

using StepSchedule = std::variant<ConstantStep, DiminishingStep>;

enum class ScheduleKind { kManual, kHeavyBall, kNesterovConstant, kNesterovVarying };

/// How the continuous time t fed to the varying schedule is derived from k.
enum class ScheduleClock { kScaled, kIteration };

struct SolverParams {
  double alpha = 0.5;
  double delta = 0.1;
  double beta = 0.0;
  double eps_restitution = 0.0;
  double eps_const = 0.0;
  StepSchedule schedule = ConstantStep{0.1};
  ScheduleKind kind = ScheduleKind::kManual;
  /// μ/L for the heavy-ball and constant Nesterov schedules. Callers normalize.
  double mu = 1.0;
  ScheduleClock clock = ScheduleClock::kScaled;

  /// Throws std::invalid_argument when the parameters are unusable.
  void validate() const;
};

/// Coefficients in force at a single iteration.
struct StepParams {
  double alpha = 0.5;
  double delta = 0.1;
  double beta = 0.0;
  double eps_restitution = 0.0;
  double eps_const = 0.0;
};

/// Polyhedral set {v : W v >= w}. `source[j]` is the constraint index that
/// produced row j.
struct VelocityCone {
  Matrix rows;
  Vector rhs;
  std::vector<Index> source;

  Index size() const { return rhs.size(); }
  bool empty() const { return rhs.size() == 0; }
};

struct TableCoefficients {
  double alpha;
  double delta;
  double beta;
};

/// γ_i(x,u) = ∇g_i(x)ᵀu + α g_i(x).  `i` is 0-based.
double constraint_velocity(const Problem& problem, const Vector& x,
                           const Vector& u, Index i, double alpha);

/// Rows for every constraint with g_i(x_k) <= ε_const; right-hand side
/// −α g_i − ε min{γ_i(x_k,u_k), 0}.
VelocityCone build_local_cone(const Problem& problem, const IterateState& state,
                              const StepParams& params);

/// All n_g rows at y = x + βu with the curvature-corrected right-hand side
/// −α g_i(x) − (g_i(y) − g_i(x) − ∇g_i(y)ᵀβu)/T.
VelocityCone build_global_cone(const Problem& problem, const IterateState& state,
                               const StepParams& params);

/// Rows for every constraint with right-hand side −α g_i(x).
VelocityCone build_full_cone(const Problem& problem, const Vector& x,
                             double alpha);

/// (α, δ, β) from the momentum parameter table at continuous time t. β is
/// the tabulated value; the discrete schemes use `discrete_beta` instead.
/// Throws std::invalid_argument for μ outside (0,1] on the constant rows and
/// for ScheduleKind::kManual.
TableCoefficients schedule_params_at(ScheduleKind kind, double t, double mu);

/// Same table evaluated at t = k·T.
TableCoefficients schedule_params(ScheduleKind kind, long k, double mu, double T);

/// Extrapolation coefficient used by the discrete schemes, T(1 − 2δT).
inline double discrete_beta(double delta, double T) {
  return T * (1.0 - 2.0 * delta * T);
}

double step_size(const StepSchedule& schedule, long k);

/// Resolves the coefficients for iteration k with step size T. `elapsed` is
/// Σ_{j<k} T_j, the clock of the varying schedule under ScheduleClock::kScaled.
StepParams resolve_step(const SolverParams& params, long k, double T,
                        double elapsed);

struct StationarityResult {
  double residual = 0.0;
  /// Length n_g; zero outside the active set.
  Vector multipliers;
  std::vector<Index> active;
};

/// min over λ >= 0 supported on {i : g_i(x) <= ε_const} of |∇f − Σ λ_i ∇g_i|.
StationarityResult stationarity_residual(const Problem& problem, const Vector& x,
                                         double eps_const = 0.0);

/// l(x) = f(x) − λᵀg(x).
double lagrangian(const Problem& problem, const Vector& x,
                  const Vector& multipliers);

}  // namespace velcone

#endif  // VELCONE_CORE_HPP
