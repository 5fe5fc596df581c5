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


#ifndef VELCONE_BENCH_HPP
#define VELCONE_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "velcone/core.hpp"
#include "velcone/lpcs.hpp"
#include "velcone/solvers.hpp"

// Baselines, experiment drivers and trace persistence for the command-line
// harness.

namespace velcone {

/// Objective together with the Euclidean projection onto its feasible set.
class ProjectedProblem {
 public:
  virtual ~ProjectedProblem() = default;
  virtual Index dim() const = 0;
  virtual double objective(const Vector& x, Vector* grad) const = 0;
  virtual Vector project(const Vector& x) const = 0;
};

/// ½|Ax − b|² over the ℓ¹ ball of radius ν.
class L1BallLeastSquares final : public ProjectedProblem {
 public:
  L1BallLeastSquares(const LinearOperator& A, const Vector& b, double nu);
  Index dim() const override { return A_.cols(); }
  double objective(const Vector& x, Vector* grad) const override;
  Vector project(const Vector& x) const override;

 private:
  const LinearOperator& A_;
  const Vector& b_;
  double nu_;
};

/// ½xᵀQx + cᵀx over the box lo <= x <= hi (infinite bounds allowed).
class BoxQuadratic final : public ProjectedProblem {
 public:
  BoxQuadratic(Matrix Q, Vector c, Vector lo, Vector hi);
  Index dim() const override { return Q_.rows(); }
  double objective(const Vector& x, Vector* grad) const override;
  Vector project(const Vector& x) const override;

 private:
  Matrix Q_;
  Vector c_;
  Vector lo_;
  Vector hi_;
};

/// x⁺ = Proj(x − T∇f(x)).
Vector pgd_step(const ProjectedProblem& problem, const Vector& x, double T);

/// Estimate sequence of the constant-step accelerated scheme.
struct ApgdState {
  Vector x;
  Vector v;
  double gamma = 0.0;
  long k = 0;
};

/// x = v = x0, γ₀ = L.
ApgdState apgd_init(const Vector& x0, double L);

/// One step: α from Lα² = (1 − α)γ + αμ, y = (αγv + γ⁺x)/(γ + αμ),
/// x⁺ = Proj(y − ∇f(y)/L), v⁺ = ((1 − α)γv + αμy − α g)/γ⁺ where g is the
/// gradient mapping L(y − x⁺).
ApgdState apgd_step(const ProjectedProblem& problem, const ApgdState& state,
                    double mu, double L);

enum class Experiment { kIllustrative, kCompressedSensing, kCustomQp };

/// Flat experiment description. Every field has a key=value spelling (see
/// `apply_setting`); command-line flags are applied after a config file.
struct ExperimentConfig {
  Experiment experiment = Experiment::kCompressedSensing;
  /// Unset fields take experiment-dependent defaults, see the effective_*
  /// helpers.
  std::optional<std::string> method;
  /// manual | heavy_ball | nesterov_constant | nesterov_varying
  std::optional<std::string> schedule;
  /// scaled (t = Σ T_j) | iteration (t = k)
  std::optional<std::string> clock;
  std::optional<double> T;
  /// constant | diminishing (T_k = T/(k+1)^s)
  std::string step = "constant";
  double s = 0.75;
  double alpha = 0.5;
  double delta = 0.1;
  double beta = 0.0;
  double eps_restitution = 0.0;
  double eps_const = 0.0;
  double mu = 1.0;
  std::optional<long> iters;
  int trace_stride = 1;

  std::uint64_t seed = 1;
  Index m = 100;
  Index n = 1000;
  Index spikes = 13;
  double noise = 0.5;
  double p = 1.0;
  double nu = 13.0;
  std::optional<double> Delta;  // 1e-6 for p = 1, 1e-3 otherwise
  std::string instance;         // load instead of generating when non-empty

  // Illustrative grid: grid × grid starting points on [x_lo, x_hi] × [u_lo, u_hi].
  int grid = 5;
  double x_lo = -3.0, x_hi = 5.0, u_lo = -3.0, u_hi = 3.0;

  // Custom QP: number of constraints for the seeded instance.
  Index constraints = 30;

  std::string out;

  /// Throws std::invalid_argument when fields are out of range or the method
  /// does not belong to the experiment.
  void validate() const;
};

std::optional<Experiment> parse_experiment(std::string_view name);
std::string_view to_string(Experiment e);

/// Sets one field from its key=value spelling; throws std::invalid_argument
/// for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key,
                   const std::string& value);

/// Parses `key = value` lines; `#` starts a comment.
void read_config(std::istream& is, ExperimentConfig& cfg);
void load_config(const std::filesystem::path& path, ExperimentConfig& cfg);

/// Sorted key=value lines of every field except `out`.
std::string canonical_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of `canonical_config`.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Step size actually used by the experiment: the configured T, else 1.8
/// (alg4) / 2 (alg5) for p = 1, 1 for p < 1, 1 for the baselines (in units
/// of 1/L) and 0.1 for the generic solvers.
double effective_T(const ExperimentConfig& cfg);
double effective_Delta(const ExperimentConfig& cfg);
/// alg4 for compressed sensing, agd_local otherwise.
std::string effective_method(const ExperimentConfig& cfg);
/// nesterov_varying for compressed sensing, manual otherwise.
std::string effective_schedule(const ExperimentConfig& cfg);
/// iteration for compressed sensing, scaled otherwise.
std::string effective_clock(const ExperimentConfig& cfg);
/// 400 for compressed sensing, 10⁴ for the illustrative problem, 10⁵ for QPs.
long effective_iters(const ExperimentConfig& cfg);
LpBall effective_ball(const ExperimentConfig& cfg);

/// SolverParams assembled from the config (schedule, clock, coefficients).
SolverParams solver_params(const ExperimentConfig& cfg);

/// `# config=<hash> seed=<seed>`, then `k,fx,min_g,unorm,kkt,elapsed_s`, one
/// row per `stride`-th record plus the last; floats with 17 significant digits.
void write_trace_csv(std::ostream& os, const Trace& trace, const ExperimentConfig& cfg,
                     int stride = 1);
void save_trace_csv(const std::filesystem::path& path, const Trace& trace,
                    const ExperimentConfig& cfg, int stride = 1);

/// f(x) = (x + 2)²/2 with g(x) = (x, 2 − x) in one dimension.
FunctionProblem illustrative_problem();

struct PhaseSample {
  double t;
  double x;
  double u;
};

struct Trajectory {
  double x0 = 0.0;
  double u0 = 0.0;
  TerminalStatus status = TerminalStatus::kMaxIter;
  std::vector<PhaseSample> samples;
};

struct IllustrativeResult {
  std::vector<Trajectory> trajectories;
};

/// Runs the configured generic method from every grid point. With a
/// non-empty `out` directory writes `traj_<i>.csv` (t,x,u) per trajectory and
/// `regions.csv` with the polygons {g_i <= 0, γ_i <= 0} clipped to the grid
/// window.
IllustrativeResult run_illustrative(const ExperimentConfig& cfg);

/// Single trajectory of the illustrative problem from (x0, u0).
Trajectory illustrative_trajectory(const ExperimentConfig& cfg, double x0, double u0);

/// Region polygons as (region, x, u) vertex rows, region ∈ {1, 2}.
struct RegionVertex {
  int region;
  double x;
  double u;
};
std::vector<RegionVertex> illustrative_regions(double alpha, double x_lo, double x_hi,
                                               double u_lo, double u_hi);

/// Generated (or loaded) instance with its operator-norm estimate.
struct CsSetup {
  CsInstance instance;
  double L = 0.0;
};
CsSetup cs_setup(const ExperimentConfig& cfg);

/// Runs one method (alg4, alg5, pgd, apgd) on the instance for cfg.iters
/// iterations. Records are produced for k = 0..iters.
Trace run_compressed_sensing(const ExperimentConfig& cfg, const CsSetup& setup);

struct CsSweepEntry {
  std::string method;
  Trace trace;
  /// Log-log slope of max(0, Σ(x̄)ᵖ_Δ − ν) over the slope window; NaN when
  /// fewer than two positive samples.
  double violation_slope;
};

/// Runs several methods on one instance concurrently; with a non-empty `out`
/// directory writes `<method>.csv` per method and `summary.txt`.
std::vector<CsSweepEntry> run_cs_sweep(const ExperimentConfig& cfg,
                                       const std::vector<std::string>& methods,
                                       long slope_k_min, long slope_k_max);

/// Violation series max(0, −min_g) with matching k's.
void violation_series(const Trace& trace, std::vector<long>& ks,
                      std::vector<double>& values);

/// Seeded random strongly convex QP: Q = MᵀM/n + 0.1·I, c ~ 3·N(0, I), n_g
/// Gaussian rows Gx >= h with h_i in [−1.5, −0.5) so the origin is strictly
/// feasible.
QuadraticProblem random_qp(Index n, Index n_g, std::uint64_t seed);

/// Reads {"Q": [[...]], "c": [...], "G": [[...]], "h": [...]} JSON.
QuadraticProblem load_qp(const std::filesystem::path& path);

/// Runs cgd / agd_local / agd_global on the custom QP.
Trace run_custom_qp(const ExperimentConfig& cfg, const QuadraticProblem& problem);

}  // namespace velcone

#endif  // VELCONE_BENCH_HPP
