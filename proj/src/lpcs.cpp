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

#include "velcone/lpcs.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "velcone/wsimplex.hpp"

namespace velcone {

void LpBall::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("smoothing threshold must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("ball radius must be positive");
}

double power_approx(double x, const LpBall& ball) {
  const double p = ball.p;
  const double d = ball.delta;
  // Both branches equal p Δᵖ at x = Δ bit for bit; the upper one avoids the
  // cancellation in Δᵖ − (1 − p)Δᵖ for small p.
  const double dp = std::pow(d, p);
  if (x >= d) return (std::pow(x, p) - dp) + p * dp;
  return p * dp * (x / d);
}

double power_approx_grad(double x, const LpBall& ball) {
  const double p = ball.p;
  return p * std::pow(std::max(x, ball.delta), p - 1.0);
}

double power_sum(const Vector& x, const LpBall& ball) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += power_approx(x(i), ball);
  return s;
}

void LinearOperator::apply(const Vector& x, Vector& y) const {
  applies_.fetch_add(1, std::memory_order_relaxed);
  do_apply(x, y);
}

void LinearOperator::apply_transpose(const Vector& y, Vector& x) const {
  transposes_.fetch_add(1, std::memory_order_relaxed);
  do_apply_transpose(y, x);
}

void LinearOperator::reset_counts() const {
  applies_.store(0);
  transposes_.store(0);
}

void DenseOperator::do_apply(const Vector& x, Vector& y) const { y.noalias() = A_ * x; }

void DenseOperator::do_apply_transpose(const Vector& y, Vector& x) const {
  x.noalias() = A_.transpose() * y;
}

double operator_norm_sq(const LinearOperator& A, std::uint64_t seed, int max_iter,
                        double tol) {
  SplitMix64 rng(seed);
  Vector v(A.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  v.normalize();
  Vector Av, AtAv;
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    A.apply(v, Av);
    A.apply_transpose(Av, AtAv);
    const double next = AtAv.norm();
    if (next == 0.0) return 0.0;
    v = AtAv / next;
    const bool done = std::abs(next - estimate) <= tol * next;
    estimate = next;
    if (done) break;
  }
  return estimate;
}

CsState cs_initial_state(const Vector& x0) {
  CsState s;
  s.x = x0;
  s.xbar = x0.cwiseAbs();
  s.u = Vector::Zero(x0.size());
  s.ubar = Vector::Zero(x0.size());
  s.k = 0;
  return s;
}

namespace {

void check_cs(const CsData& data, const CsState& state) {
  const Index n = data.A.cols();
  if (state.x.size() != n || state.xbar.size() != n || state.u.size() != n ||
      state.ubar.size() != n)
    throw std::invalid_argument("compressed-sensing state has the wrong dimension");
  if (data.b.size() != data.A.rows())
    throw std::invalid_argument("measurement vector has the wrong length");
  if (!(data.L > 0.0)) throw std::invalid_argument("L must be positive");
}

// r = u − 2δT u − T Aᵀ(A(x+βu) − b)/L,  r̄ = ū − 2δT ū
void unconstrained_update(const CsData& data, const CsState& s,
                          const StepParams& params, double T, Vector& r,
                          Vector& rbar) {
  Vector y = s.x + params.beta * s.u;
  Vector res, grad;
  data.A.apply(y, res);
  res -= data.b;
  data.A.apply_transpose(res, grad);
  const double damp = 1.0 - 2.0 * params.delta * T;
  r = damp * s.u - (T / data.L) * grad;
  rbar = damp * s.ubar;
}

// Change of variables, weighted-simplex projection, inverse change of
// variables and position update; shared by both schemes.
CsState finish_step(const CsState& s, const Vector& r, const Vector& rbar,
                    const Vector& g1, const Vector& g2, double g3, const Vector& w,
                    std::vector<bool> active, double T, CsStepReport* report,
                    bool budget_row) {
  const Index n = s.x.size();
  WeightedSimplexInstance inst;
  inst.q.resize(2 * n);
  inst.q << 0.5 * g1 + 0.5 * (r + rbar), 0.5 * g2 + 0.5 * (rbar - r);
  inst.weights.resize(2 * n);
  inst.weights << w, w;
  inst.budget = g3 + 0.5 * w.dot(g1 + g2);
  inst.nonneg = active;
  const Vector xi_all = project_weighted_simplex(inst);
  const auto xi = xi_all.head(n);
  const auto xi_bar = xi_all.tail(n);

  CsState next;
  next.u = xi - xi_bar - 0.5 * (g1 - g2);
  next.ubar = xi + xi_bar - 0.5 * (g1 + g2);
  next.x = s.x + T * next.u;
  next.xbar = s.xbar + T * next.ubar;
  next.k = s.k + 1;

  if (report) {
    report->g1 = g1;
    report->g2 = g2;
    report->g3 = g3;
    report->weights = w;
    report->active = std::move(active);
    report->budget_row = budget_row;
    report->budget = inst.budget;
    report->r = r;
    report->rbar = rbar;
  }
  return next;
}

}  // namespace

CsState alg4_step(const CsData& data, const CsState& state, const LpBall& ball,
                  const StepParams& params, double T, CsStepReport* report) {
  check_cs(data, state);
  const Index n = state.x.size();
  Vector r, rbar;
  unconstrained_update(data, state, params, T, r, rbar);

  // Rows enter when g_i <= ε_const (ε_const = 0 gives I = {g̃_i <= 0}).
  const double a = params.alpha;
  const double cut = params.eps_const;
  const Vector c1 = state.x + state.xbar;
  const Vector c2 = state.xbar - state.x;
  const double c3 = ball.nu - power_sum(state.xbar, ball);

  Vector w = Vector::Zero(n);
  const bool budget_row = !(c3 > cut);
  if (budget_row)
    for (Index i = 0; i < n; ++i) w(i) = power_approx_grad(state.xbar(i), ball);

  std::vector<bool> active(static_cast<std::size_t>(2 * n));
  for (Index i = 0; i < n; ++i) {
    active[static_cast<std::size_t>(i)] = c1(i) <= cut;
    active[static_cast<std::size_t>(n + i)] = c2(i) <= cut;
  }
  return finish_step(state, r, rbar, a * c1, a * c2, a * c3, w, std::move(active), T,
                     report, budget_row);
}

CsState alg5_step(const CsData& data, const CsState& state, const LpBall& ball,
                  const StepParams& params, double T, CsStepReport* report) {
  check_cs(data, state);
  const Index n = state.x.size();
  Vector r, rbar;
  unconstrained_update(data, state, params, T, r, rbar);

  const double a = params.alpha;
  const double beta = params.beta;
  const Vector ybar = state.xbar + beta * state.ubar;
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = power_approx_grad(ybar(i), ball);

  const Vector y = state.x + beta * state.u;
  const Vector g1 = state.x + state.xbar;
  const Vector g2 = state.xbar - state.x;
  const double g3 = ball.nu - power_sum(state.xbar, ball);
  const Vector gy1 = y + ybar;
  const Vector gy2 = ybar - y;
  const double gy3 = ball.nu - power_sum(ybar, ball);

  const Vector t1 = a * g1 + (gy1 - g1 - beta * (state.u + state.ubar)) / T;
  const Vector t2 = a * g2 + (gy2 - g2 - beta * (state.ubar - state.u)) / T;
  const double t3 = a * g3 + (gy3 - g3 + beta * w.dot(state.ubar)) / T;

  std::vector<bool> active(static_cast<std::size_t>(2 * n), true);
  return finish_step(state, r, rbar, t1, t2, t3, w, std::move(active), T, report,
                     true);
}

double lifted_violation(const CsState& state, const LpBall& ball) {
  double v = std::max(0.0, power_sum(state.xbar, ball) - ball.nu);
  for (Index i = 0; i < state.x.size(); ++i) {
    v = std::max(v, -(state.xbar(i) + state.x(i)));
    v = std::max(v, -(state.xbar(i) - state.x(i)));
  }
  return v;
}

Trace run_lp(const CsData& data, CsMethod method, const LpBall& ball,
             const SolverParams& params, long iters, const Vector& x0,
             const CsObserver& observer, CsState* final_state) {
  ball.validate();
  params.validate();
  if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
  if (x0.size() != data.A.cols()) throw std::invalid_argument("x0 has the wrong length");

  const auto start = std::chrono::steady_clock::now();
  Trace trace;
  CsState state = cs_initial_state(x0);
  double elapsed_time = 0.0;
  Vector res;
  CsStepReport report;
  for (;;) {
    const double T = step_size(params.schedule, state.k);
    TraceRecord rec;
    rec.k = state.k;
    rec.T = T;
    data.A.apply(state.x, res);
    res -= data.b;
    rec.fx = 0.5 * res.squaredNorm();
    rec.min_g = ball.nu - power_sum(state.xbar, ball);
    rec.unorm = std::sqrt(state.u.squaredNorm() + state.ubar.squaredNorm());
    rec.kkt = std::numeric_limits<double>::quiet_NaN();
    rec.active = 0;
    rec.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (state.k >= iters) {
      trace.records.push_back(rec);
      break;
    }
    const StepParams sp = resolve_step(params, state.k, T, elapsed_time);
    CsState next = method == CsMethod::kAlg4
                       ? alg4_step(data, state, ball, sp, T, &report)
                       : alg5_step(data, state, ball, sp, T, &report);
    Index count = report.budget_row && report.weights.any() ? 1 : 0;
    for (bool b : report.active) count += b ? 1 : 0;
    rec.active = count;
    trace.records.push_back(rec);
    if (observer) observer(state, next, report, sp, T);
    elapsed_time += T;
    state = std::move(next);
  }
  trace.status = TerminalStatus::kMaxIter;
  trace.final_state.x = state.x;
  trace.final_state.u = state.u;
  trace.final_state.k = state.k;
  trace.final_state.T = step_size(params.schedule, state.k);
  if (final_state) *final_state = std::move(state);
  return trace;
}

LiftedLpProblem::LiftedLpProblem(Matrix A, Vector b, LpBall ball, double scale)
    : A_(std::move(A)), b_(std::move(b)), ball_(ball), scale_(scale) {
  ball_.validate();
  if (b_.size() != A_.rows()) throw std::invalid_argument("b has the wrong length");
  if (!(scale_ > 0.0)) throw std::invalid_argument("objective scale must be positive");
}

double LiftedLpProblem::objective(const Vector& z, Vector* grad) const {
  const Index n = A_.cols();
  Vector res = A_ * z.head(n) - b_;
  if (grad) {
    grad->setZero(2 * n);
    grad->head(n) = A_.transpose() * res / scale_;
  }
  return 0.5 * res.squaredNorm() / scale_;
}

void LiftedLpProblem::constraints(const Vector& z, Vector& g) const {
  const Index n = A_.cols();
  const auto x = z.head(n);
  const auto xbar = z.tail(n);
  g.resize(2 * n + 1);
  g.head(n) = xbar + x;
  g.segment(n, n) = xbar - x;
  g(2 * n) = ball_.nu - power_sum(xbar, ball_);
}

void LiftedLpProblem::constraint_gradient(const Vector& z, Index i,
                                          Vector& row) const {
  const Index n = A_.cols();
  row.setZero(2 * n);
  if (i < n) {
    row(i) = 1.0;
    row(n + i) = 1.0;
  } else if (i < 2 * n) {
    row(i - n) = -1.0;
    row(i) = 1.0;
  } else {
    for (Index j = 0; j < n; ++j) row(n + j) = -power_approx_grad(z(n + j), ball_);
  }
}

double LiftedLpProblem::constraint_smoothness(Index i) const {
  if (i < 2 * A_.cols()) return 0.0;
  const double p = ball_.p;
  return p * (1.0 - p) * std::pow(ball_.delta, p - 2.0);
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("below: bound must be positive");
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  const auto k = static_cast<std::uint64_t>(u * static_cast<double>(bound));
  return k < bound ? k : bound - 1;
}

CsInstance gen_compressed_sensing(Index m, Index n, Index spikes,
                                  double noise_scale, std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("dimensions must be positive");
  if (spikes < 0 || spikes > n) throw std::invalid_argument("spikes must lie in [0, n]");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("noise scale must be >= 0");
  SplitMix64 rng(seed);
  CsInstance inst;
  inst.A.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) inst.A(i, j) = rng.normal();

  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) idx[static_cast<std::size_t>(j)] = j;
  inst.x_true = Vector::Zero(n);
  for (Index s = 0; s < spikes; ++s) {
    const auto pick = s + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - s)));
    std::swap(idx[static_cast<std::size_t>(s)], idx[static_cast<std::size_t>(pick)]);
    inst.x_true(idx[static_cast<std::size_t>(s)]) = 1.0;
  }

  // Fixed summation order so b does not depend on the BLAS kernel.
  inst.b.resize(m);
  for (Index i = 0; i < m; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += inst.A(i, j) * inst.x_true(j);
    inst.b(i) = acc;
  }
  for (Index i = 0; i < m; ++i) inst.b(i) += noise_scale * rng.normal();
  return inst;
}

namespace {

constexpr const char* kMagic = "velcone-instance";

void write_values(std::ostream& os, const double* data, Index count) {
  for (Index i = 0; i < count; ++i) {
    if (i) os << ' ';
    os << data[i];
  }
  os << '\n';
}

void expect_label(std::istream& is, const std::string& label) {
  std::string got;
  if (!(is >> got) || got != label)
    throw std::runtime_error("instance file: expected '" + label + "', got '" + got + "'");
}

Index read_dim(std::istream& is) {
  long long v = -1;
  if (!(is >> v) || v < 0) throw std::runtime_error("instance file: bad dimension");
  return static_cast<Index>(v);
}

void read_values(std::istream& is, double* data, Index count) {
  for (Index i = 0; i < count; ++i)
    if (!(is >> data[i])) throw std::runtime_error("instance file: truncated data");
}

}  // namespace

void write_instance(std::ostream& os, const CsInstance& inst) {
  const auto old_prec = os.precision(17);
  os << kMagic << " 1\n";
  os << "A " << inst.A.rows() << ' ' << inst.A.cols() << '\n';
  for (Index i = 0; i < inst.A.rows(); ++i) {
    Vector row = inst.A.row(i).transpose();
    write_values(os, row.data(), row.size());
  }
  os << "b " << inst.b.size() << '\n';
  write_values(os, inst.b.data(), inst.b.size());
  os << "x_true " << inst.x_true.size() << '\n';
  write_values(os, inst.x_true.data(), inst.x_true.size());
  os.precision(old_prec);
}

CsInstance read_instance(std::istream& is) {
  expect_label(is, kMagic);
  int version = 0;
  if (!(is >> version) || version != 1)
    throw std::runtime_error("instance file: unsupported version");
  CsInstance inst;
  expect_label(is, "A");
  const Index m = read_dim(is);
  const Index n = read_dim(is);
  inst.A.resize(m, n);
  Vector row(n);
  for (Index i = 0; i < m; ++i) {
    read_values(is, row.data(), n);
    inst.A.row(i) = row.transpose();
  }
  expect_label(is, "b");
  if (read_dim(is) != m) throw std::runtime_error("instance file: b length mismatch");
  inst.b.resize(m);
  read_values(is, inst.b.data(), m);
  expect_label(is, "x_true");
  if (read_dim(is) != n) throw std::runtime_error("instance file: x_true length mismatch");
  inst.x_true.resize(n);
  read_values(is, inst.x_true.data(), n);
  return inst;
}

void save_instance(const std::filesystem::path& path, const CsInstance& inst) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_instance(os, inst);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

CsInstance load_instance(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_instance(is);
}

}  // namespace velcone
