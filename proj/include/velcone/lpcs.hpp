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

#ifndef VELCONE_LPCS_HPP
#define VELCONE_LPCS_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "velcone/core.hpp"
#include "velcone/solvers.hpp"

// ℓᵖ-ball constrained least squares
//
//   min ½|Ax − b|²  s.t.  −x̄ <= x <= x̄,  Σ (x̄_i)ᵖ_Δ <= ν
//
// solved by the local and global momentum schemes in closed form: the velocity
// subproblem becomes a weighted-simplex projection after a change of
// variables, so each step costs one sort plus one A and one Aᵀ product.

namespace velcone {

struct LpBall {
  double p = 1.0;
  double nu = 1.0;
  double delta = 1e-6;

  void validate() const;
};

/// (x)ᵖ_Δ: xᵖ − Δᵖ(1 − p) for x >= Δ, linear p Δ^{p−1} x below.
double power_approx(double x, const LpBall& ball);

/// d(x)ᵖ_Δ/dx; nonnegative and finite everywhere.
double power_approx_grad(double x, const LpBall& ball);

/// Σ_i (x_i)ᵖ_Δ.
double power_sum(const Vector& x, const LpBall& ball);

/// Matrix-free y ↦ Ay and y ↦ Aᵀy with application counters.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  void apply(const Vector& x, Vector& y) const;
  void apply_transpose(const Vector& y, Vector& x) const;

  long apply_count() const { return applies_.load(); }
  long transpose_count() const { return transposes_.load(); }
  void reset_counts() const;

 protected:
  virtual void do_apply(const Vector& x, Vector& y) const = 0;
  virtual void do_apply_transpose(const Vector& y, Vector& x) const = 0;

 private:
  mutable std::atomic<long> applies_{0};
  mutable std::atomic<long> transposes_{0};
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix A) : A_(std::move(A)) {}
  Index rows() const override { return A_.rows(); }
  Index cols() const override { return A_.cols(); }
  const Matrix& matrix() const { return A_; }

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_transpose(const Vector& y, Vector& x) const override;

 private:
  Matrix A_;
};

/// |A|² estimated by power iteration on AᵀA from a seeded start vector.
double operator_norm_sq(const LinearOperator& A, std::uint64_t seed = 1,
                        int max_iter = 30, double tol = 1e-6);

struct CsState {
  Vector x;
  Vector xbar;
  Vector u;
  Vector ubar;
  long k = 0;
};

/// x̄₀ = |x₀|, u₀ = ū₀ = 0.
CsState cs_initial_state(const Vector& x0);

/// Intermediate quantities of one closed-form step, in the order the step
/// computes them.
struct CsStepReport {
  Vector g1;        // g̃₁ (right-hand side of x̄ + x >= 0 rows)
  Vector g2;        // g̃₂ (x̄ − x >= 0 rows)
  double g3 = 0.0;  // g̃₃ (budget row)
  Vector weights;   // w (zero when the budget row is inactive)
  std::vector<bool> active;  // I over the 2n sign rows
  bool budget_row = false;
  double budget = 0.0;  // ν̄
  Vector r;
  Vector rbar;
};

/// Least-squares data shared by both closed-form steps. The gradient step is
/// Aᵀ(A(x+βu) − b)/L with L = |A|².
struct CsData {
  const LinearOperator& A;
  const Vector& b;
  double L;
};

/// One step of the local scheme on the lifted problem: only constraints with
/// g_i(x_k, x̄_k) <= params.eps_const enter the velocity projection.
CsState alg4_step(const CsData& data, const CsState& state, const LpBall& ball,
                  const StepParams& params, double T,
                  CsStepReport* report = nullptr);

/// One step of the global scheme: all 2n + 1 constraints, weights and
/// curvature corrections evaluated at the extrapolated point.
CsState alg5_step(const CsData& data, const CsState& state, const LpBall& ball,
                  const StepParams& params, double T,
                  CsStepReport* report = nullptr);

enum class CsMethod { kAlg4, kAlg5 };

using CsObserver = std::function<void(const CsState& before, const CsState& after,
                                      const CsStepReport& report,
                                      const StepParams& params, double T)>;

/// Runs `iters` closed-form steps from x0. Records carry k, T, ½|Ax − b|²,
/// ν − Σ(x̄_i)ᵖ_Δ in `min_g`, |(u, ū)| and elapsed time; `kkt` is NaN.
Trace run_lp(const CsData& data, CsMethod method, const LpBall& ball,
             const SolverParams& params, long iters, const Vector& x0,
             const CsObserver& observer = {}, CsState* final_state = nullptr);

/// Largest violation of the lifted constraints max(0, −g), with
/// g = (x̄ + x, x̄ − x, ν − Σ(x̄_i)ᵖ_Δ).
double lifted_violation(const CsState& state, const LpBall& ball);

/// Problem (x, x̄) ↦ ½|Ax − b|²/scale with the 2n + 1 lifted constraints
/// ordered (x̄ + x, x̄ − x, ν − Σ(x̄_i)ᵖ_Δ). Lets the generic solvers run on
/// the same problem as the closed-form steps.
class LiftedLpProblem final : public Problem {
 public:
  LiftedLpProblem(Matrix A, Vector b, LpBall ball, double scale = 1.0);

  Index dim() const override { return 2 * A_.cols(); }
  Index num_constraints() const override { return 2 * A_.cols() + 1; }
  double objective(const Vector& z, Vector* grad) const override;
  void constraints(const Vector& z, Vector& g) const override;
  void constraint_gradient(const Vector& z, Index i,
                           Vector& row) const override;
  double constraint_smoothness(Index i) const override;

  Index n() const { return A_.cols(); }
  const LpBall& ball() const { return ball_; }

 private:
  Matrix A_;
  Vector b_;
  LpBall ball_;
  double scale_;
};

/// splitmix64 generator; the stream is fixed so that instances are
/// bit-identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform on (0, 1], 53 random bits.
  double uniform();
  /// Box–Muller: sqrt(−2 ln u₁) cos(2π u₂); both outputs of a pair are used,
  /// cosine first.
  double normal();
  /// Uniform integer in [0, bound): floor(v · bound) with v a 53-bit value in [0, 1).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct CsInstance {
  Matrix A;
  Vector b;
  Vector x_true;
};

/// A with i.i.d. standard normal entries (row-major draw order), x_true with
/// `spikes` ones at distinct positions (partial Fisher–Yates), then
/// b = A x_true + noise_scale·η with η standard normal.
CsInstance gen_compressed_sensing(Index m, Index n, Index spikes,
                                  double noise_scale, std::uint64_t seed);

/// Text format, see docs/formats.md.
void write_instance(std::ostream& os, const CsInstance& inst);
CsInstance read_instance(std::istream& is);
void save_instance(const std::filesystem::path& path, const CsInstance& inst);
CsInstance load_instance(const std::filesystem::path& path);

}  // namespace velcone

#endif  // VELCONE_LPCS_HPP
