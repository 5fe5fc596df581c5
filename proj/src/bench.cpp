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


#include "velcone/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "velcone/wsimplex.hpp"

namespace velcone {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_generic_method(const std::string& m) {
  return parse_method(m).has_value();
}

bool is_cs_method(const std::string& m) {
  return m == "alg4" || m == "alg5" || m == "pgd" || m == "apgd";
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + value + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ScheduleKind parse_schedule(const std::string& name) {
  if (name == "manual") return ScheduleKind::kManual;
  if (name == "heavy_ball") return ScheduleKind::kHeavyBall;
  if (name == "nesterov_constant") return ScheduleKind::kNesterovConstant;
  if (name == "nesterov_varying") return ScheduleKind::kNesterovVarying;
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

ScheduleClock parse_clock(const std::string& name) {
  if (name == "scaled") return ScheduleClock::kScaled;
  if (name == "iteration") return ScheduleClock::kIteration;
  throw std::invalid_argument("unknown clock '" + name + "'");
}

std::map<std::string, std::string> config_fields(const ExperimentConfig& c) {
  const auto opt = [](const auto& o, auto fmt) -> std::string {
    return o ? fmt(*o) : std::string("default");
  };
  const auto dbl = [](double v) { return format_double(v); };
  const auto str = [](const std::string& v) { return v; };
  std::map<std::string, std::string> f;
  f["experiment"] = std::string(to_string(c.experiment));
  f["method"] = opt(c.method, str);
  f["schedule"] = opt(c.schedule, str);
  f["clock"] = opt(c.clock, str);
  f["T"] = opt(c.T, dbl);
  f["step"] = c.step;
  f["s"] = dbl(c.s);
  f["alpha"] = dbl(c.alpha);
  f["delta"] = dbl(c.delta);
  f["beta"] = dbl(c.beta);
  f["eps"] = dbl(c.eps_restitution);
  f["eps_const"] = dbl(c.eps_const);
  f["mu"] = dbl(c.mu);
  f["iters"] = opt(c.iters, [](long v) { return std::to_string(v); });
  f["trace_stride"] = std::to_string(c.trace_stride);
  f["seed"] = std::to_string(c.seed);
  f["m"] = std::to_string(c.m);
  f["n"] = std::to_string(c.n);
  f["spikes"] = std::to_string(c.spikes);
  f["noise"] = dbl(c.noise);
  f["p"] = dbl(c.p);
  f["nu"] = dbl(c.nu);
  f["Delta"] = opt(c.Delta, dbl);
  f["instance"] = c.instance;
  f["grid"] = std::to_string(c.grid);
  f["x_lo"] = dbl(c.x_lo);
  f["x_hi"] = dbl(c.x_hi);
  f["u_lo"] = dbl(c.u_lo);
  f["u_hi"] = dbl(c.u_hi);
  f["constraints"] = std::to_string(c.constraints);
  return f;
}

}  // namespace

L1BallLeastSquares::L1BallLeastSquares(const LinearOperator& A, const Vector& b,
                                       double nu)
    : A_(A), b_(b), nu_(nu) {
  if (b.size() != A.rows()) throw std::invalid_argument("b has the wrong length");
  if (!(nu >= 0.0)) throw std::invalid_argument("l1 ball radius must be >= 0");
}

double L1BallLeastSquares::objective(const Vector& x, Vector* grad) const {
  Vector res;
  A_.apply(x, res);
  res -= b_;
  if (grad) A_.apply_transpose(res, *grad);
  return 0.5 * res.squaredNorm();
}

Vector L1BallLeastSquares::project(const Vector& x) const {
  return project_l1_ball(x, nu_);
}

BoxQuadratic::BoxQuadratic(Matrix Q, Vector c, Vector lo, Vector hi)
    : Q_(std::move(Q)), c_(std::move(c)), lo_(std::move(lo)), hi_(std::move(hi)) {
  const Index n = Q_.rows();
  if (Q_.cols() != n || c_.size() != n || lo_.size() != n || hi_.size() != n)
    throw std::invalid_argument("BoxQuadratic: dimension mismatch");
  if ((lo_.array() > hi_.array()).any())
    throw std::invalid_argument("BoxQuadratic: empty box");
}

double BoxQuadratic::objective(const Vector& x, Vector* grad) const {
  Vector Qx = Q_ * x;
  if (grad) *grad = Qx + c_;
  return 0.5 * x.dot(Qx) + c_.dot(x);
}

Vector BoxQuadratic::project(const Vector& x) const {
  return x.cwiseMax(lo_).cwiseMin(hi_);
}

Vector pgd_step(const ProjectedProblem& problem, const Vector& x, double T) {
  Vector grad;
  problem.objective(x, &grad);
  return problem.project(x - T * grad);
}

ApgdState apgd_init(const Vector& x0, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("apgd: L must be positive");
  ApgdState s;
  s.x = x0;
  s.v = x0;
  s.gamma = L;
  s.k = 0;
  return s;
}

ApgdState apgd_step(const ProjectedProblem& problem, const ApgdState& state,
                    double mu, double L) {
  if (!(L > 0.0) || !(mu >= 0.0) || mu > L)
    throw std::invalid_argument("apgd: need 0 <= mu <= L, L > 0");
  const double g = state.gamma;
  // Positive root of Lα² + (γ − μ)α − γ = 0.
  const double a = (-(g - mu) + std::sqrt((g - mu) * (g - mu) + 4.0 * L * g)) / (2.0 * L);
  const double g_next = (1.0 - a) * g + a * mu;
  const Vector y = (a * g * state.v + g_next * state.x) / (g + a * mu);
  Vector grad;
  problem.objective(y, &grad);
  ApgdState next;
  next.x = problem.project(y - grad / L);
  const Vector mapping = L * (y - next.x);
  next.v = ((1.0 - a) * g * state.v + a * mu * y - a * mapping) / g_next;
  next.gamma = g_next;
  next.k = state.k + 1;
  return next;
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  if (name == "illustrative") return Experiment::kIllustrative;
  if (name == "compressed_sensing" || name == "cs") return Experiment::kCompressedSensing;
  if (name == "custom_qp") return Experiment::kCustomQp;
  return std::nullopt;
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kIllustrative: return "illustrative";
    case Experiment::kCompressedSensing: return "compressed_sensing";
    case Experiment::kCustomQp: return "custom_qp";
  }
  return "?";
}

std::string effective_method(const ExperimentConfig& cfg) {
  if (cfg.method) return *cfg.method;
  return cfg.experiment == Experiment::kCompressedSensing ? "alg4" : "agd_local";
}

std::string effective_schedule(const ExperimentConfig& cfg) {
  if (cfg.schedule) return *cfg.schedule;
  return cfg.experiment == Experiment::kCompressedSensing ? "nesterov_varying" : "manual";
}

std::string effective_clock(const ExperimentConfig& cfg) {
  if (cfg.clock) return *cfg.clock;
  return cfg.experiment == Experiment::kCompressedSensing ? "iteration" : "scaled";
}

long effective_iters(const ExperimentConfig& cfg) {
  if (cfg.iters) return *cfg.iters;
  switch (cfg.experiment) {
    case Experiment::kCompressedSensing: return 400;
    case Experiment::kIllustrative: return 10000;
    case Experiment::kCustomQp: return 100000;
  }
  return 400;
}

double effective_T(const ExperimentConfig& cfg) {
  if (cfg.T) return *cfg.T;
  const std::string m = effective_method(cfg);
  if (m == "alg4") return cfg.p == 1.0 ? 1.8 : 1.0;
  if (m == "alg5") return cfg.p == 1.0 ? 2.0 : 1.0;
  if (m == "pgd" || m == "apgd") return 1.0;
  return 0.1;
}

double effective_Delta(const ExperimentConfig& cfg) {
  if (cfg.Delta) return *cfg.Delta;
  return cfg.p == 1.0 ? 1e-6 : 1e-3;
}

LpBall effective_ball(const ExperimentConfig& cfg) {
  return LpBall{cfg.p, cfg.nu, effective_Delta(cfg)};
}

SolverParams solver_params(const ExperimentConfig& cfg) {
  SolverParams sp;
  sp.alpha = cfg.alpha;
  sp.delta = cfg.delta;
  sp.beta = cfg.beta;
  sp.eps_restitution = cfg.eps_restitution;
  sp.eps_const = cfg.eps_const;
  sp.mu = cfg.mu;
  sp.kind = parse_schedule(effective_schedule(cfg));
  sp.clock = parse_clock(effective_clock(cfg));
  const double T = effective_T(cfg);
  if (cfg.step == "constant")
    sp.schedule = ConstantStep{T};
  else if (cfg.step == "diminishing")
    sp.schedule = DiminishingStep{T, cfg.s};
  else
    throw std::invalid_argument("unknown step rule '" + cfg.step + "'");
  return sp;
}

void ExperimentConfig::validate() const {
  const std::string m = effective_method(*this);
  if (experiment == Experiment::kCompressedSensing) {
    if (!is_cs_method(m))
      throw std::invalid_argument("method '" + m + "' is not available for compressed sensing");
    if ((m == "pgd" || m == "apgd") && p != 1.0)
      throw std::invalid_argument(m + " needs a closed-form projection and requires p = 1");
    effective_ball(*this).validate();
    if (instance.empty()) {
      if (this->m <= 0 || n <= 0) throw std::invalid_argument("m and n must be positive");
      if (spikes < 0 || spikes > n) throw std::invalid_argument("spikes must lie in [0, n]");
      if (!(noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
    }
  } else {
    if (!is_generic_method(m))
      throw std::invalid_argument("method '" + m + "' is only available for compressed sensing");
  }
  if (effective_iters(*this) < 0) throw std::invalid_argument("iters must be >= 0");
  if (trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");
  if (experiment == Experiment::kIllustrative) {
    if (grid < 1) throw std::invalid_argument("grid must be >= 1");
    if (!(x_lo < x_hi) || !(u_lo < u_hi))
      throw std::invalid_argument("illustrative window is empty");
  }
  if (experiment == Experiment::kCustomQp) {
    if (n <= 0 || constraints < 0)
      throw std::invalid_argument("custom QP needs n > 0 and constraints >= 0");
  }
  solver_params(*this).validate();
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const auto dbl = [&] { return parse_double(key, value); };
  const auto integer = [&] { return parse_integer(key, value); };
  const auto count = [&] {
    const long long v = integer();
    if (v < 0) throw std::invalid_argument("config: " + key + " must be >= 0");
    return v;
  };
  if (key == "experiment") {
    auto e = parse_experiment(value);
    if (!e) throw std::invalid_argument("config: unknown experiment '" + value + "'");
    c.experiment = *e;
  } else if (key == "method") {
    if (!is_generic_method(value) && !is_cs_method(value))
      throw std::invalid_argument("config: unknown method '" + value + "'");
    c.method = value;
  } else if (key == "schedule") {
    parse_schedule(value);
    c.schedule = value;
  } else if (key == "clock") {
    parse_clock(value);
    c.clock = value;
  } else if (key == "T") {
    c.T = dbl();
  } else if (key == "step") {
    if (value != "constant" && value != "diminishing")
      throw std::invalid_argument("config: step must be constant or diminishing");
    c.step = value;
  } else if (key == "s") {
    c.s = dbl();
  } else if (key == "alpha") {
    c.alpha = dbl();
  } else if (key == "delta") {
    c.delta = dbl();
  } else if (key == "beta") {
    c.beta = dbl();
  } else if (key == "eps") {
    c.eps_restitution = dbl();
  } else if (key == "eps_const") {
    c.eps_const = dbl();
  } else if (key == "mu") {
    c.mu = dbl();
  } else if (key == "iters") {
    c.iters = static_cast<long>(count());
  } else if (key == "trace_stride") {
    c.trace_stride = static_cast<int>(integer());
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(count());
  } else if (key == "m") {
    c.m = static_cast<Index>(integer());
  } else if (key == "n") {
    c.n = static_cast<Index>(integer());
  } else if (key == "spikes") {
    c.spikes = static_cast<Index>(integer());
  } else if (key == "noise") {
    c.noise = dbl();
  } else if (key == "p") {
    c.p = dbl();
  } else if (key == "nu") {
    c.nu = dbl();
  } else if (key == "Delta") {
    c.Delta = dbl();
  } else if (key == "instance") {
    c.instance = value;
  } else if (key == "grid") {
    c.grid = static_cast<int>(integer());
  } else if (key == "x_lo") {
    c.x_lo = dbl();
  } else if (key == "x_hi") {
    c.x_hi = dbl();
  } else if (key == "u_lo") {
    c.u_lo = dbl();
  } else if (key == "u_hi") {
    c.u_hi = dbl();
  } else if (key == "constraints") {
    c.constraints = static_cast<Index>(integer());
  } else if (key == "out") {
    c.out = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

void read_config(std::istream& is, ExperimentConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void load_config(const std::filesystem::path& path, ExperimentConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config " + path.string());
  read_config(is, cfg);
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_fields(cfg)) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_trace_csv(std::ostream& os, const Trace& trace, const ExperimentConfig& cfg,
                     int stride) {
  if (stride < 1) throw std::invalid_argument("trace stride must be >= 1");
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
  os << "# config=" << hash.str() << " seed=" << cfg.seed << '\n';
  os << "k,fx,min_g,unorm,kkt,elapsed_s\n";
  const auto old = os.precision(17);
  const std::size_t count = trace.records.size();
  for (std::size_t i = 0; i < count; ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != count) continue;
    const auto& r = trace.records[i];
    os << r.k << ',' << r.fx << ',' << r.min_g << ',' << r.unorm << ',' << r.kkt << ','
       << r.elapsed_s << '\n';
  }
  os.precision(old);
}

void save_trace_csv(const std::filesystem::path& path, const Trace& trace,
                    const ExperimentConfig& cfg, int stride) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace_csv(os, trace, cfg, stride);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

FunctionProblem illustrative_problem() {
  return FunctionProblem(
      1, 2,
      [](const Vector& x, Vector* grad) {
        if (grad) *grad = Vector::Constant(1, x(0) + 2.0);
        return 0.5 * (x(0) + 2.0) * (x(0) + 2.0);
      },
      [](const Vector& x, Vector& g) {
        g.resize(2);
        g << x(0), 2.0 - x(0);
      },
      [](const Vector&, Index i, Vector& row) {
        row = Vector::Constant(1, i == 0 ? 1.0 : -1.0);
      },
      {0.0, 0.0});
}

Trajectory illustrative_trajectory(const ExperimentConfig& cfg, double x0, double u0) {
  const FunctionProblem problem = illustrative_problem();
  const auto method = parse_method(effective_method(cfg));
  if (!method) throw std::invalid_argument("illustrative problem needs cgd/agd_local/agd_global");
  StoppingRule stop;
  stop.max_iter = std::max(1L, effective_iters(cfg));
  Trajectory traj;
  traj.x0 = x0;
  traj.u0 = u0;
  double t = 0.0;
  traj.samples.push_back({0.0, x0, u0});
  const auto observer = [&](const IterateState& before, const IterateState& after,
                            const StepReport&) {
    t += before.T;
    traj.samples.push_back({t, after.x(0), after.u(0)});
  };
  const Trace trace = run(problem, *method, solver_params(cfg), stop,
                          Vector::Constant(1, x0), Vector::Constant(1, u0), observer);
  traj.status = trace.status;
  return traj;
}

std::vector<RegionVertex> illustrative_regions(double alpha, double x_lo, double x_hi,
                                               double u_lo, double u_hi) {
  struct HalfPlane {
    double a, b, c;  // a x + b u <= c
  };
  using Poly = std::vector<std::pair<double, double>>;
  const auto clip = [](const Poly& poly, const HalfPlane& h) {
    Poly out;
    const auto side = [&](const std::pair<double, double>& p) {
      return h.a * p.first + h.b * p.second - h.c;
    };
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& P = poly[i];
      const auto& Q = poly[(i + 1) % poly.size()];
      const double sp = side(P), sq = side(Q);
      if (sp <= 0.0) out.push_back(P);
      if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
        const double t = sp / (sp - sq);
        out.emplace_back(P.first + t * (Q.first - P.first), P.second + t * (Q.second - P.second));
      }
    }
    return out;
  };
  const Poly box{{x_lo, u_lo}, {x_hi, u_lo}, {x_hi, u_hi}, {x_lo, u_hi}};
  // R1: x <= 0, u + αx <= 0.  R2: 2 − x <= 0, −u + α(2 − x) <= 0.
  const std::vector<std::vector<HalfPlane>> regions{
      {{1.0, 0.0, 0.0}, {alpha, 1.0, 0.0}},
      {{-1.0, 0.0, -2.0}, {-alpha, -1.0, -2.0 * alpha}}};
  std::vector<RegionVertex> out;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    Poly poly = box;
    for (const auto& h : regions[r]) poly = clip(poly, h);
    for (const auto& [x, u] : poly) out.push_back({static_cast<int>(r + 1), x, u});
  }
  return out;
}

IllustrativeResult run_illustrative(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment != Experiment::kIllustrative)
    throw std::invalid_argument("run_illustrative needs experiment=illustrative");
  IllustrativeResult result;
  const auto axis = [&](double lo, double hi, int i) {
    return cfg.grid == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (cfg.grid - 1);
  };
  for (int i = 0; i < cfg.grid; ++i)
    for (int j = 0; j < cfg.grid; ++j)
      result.trajectories.push_back(illustrative_trajectory(
          cfg, axis(cfg.x_lo, cfg.x_hi, i), axis(cfg.u_lo, cfg.u_hi, j)));

  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
      const auto& tr = result.trajectories[i];
      std::ofstream os(dir / ("traj_" + std::to_string(i) + ".csv"));
      os << "# config=" << hash.str() << " seed=" << cfg.seed << " x0=" << tr.x0
         << " u0=" << tr.u0 << " status=" << to_string(tr.status) << '\n';
      os << "t,x,u\n" << std::setprecision(17);
      for (std::size_t s = 0; s < tr.samples.size(); ++s) {
        if (s % static_cast<std::size_t>(cfg.trace_stride) != 0 && s + 1 != tr.samples.size())
          continue;
        os << tr.samples[s].t << ',' << tr.samples[s].x << ',' << tr.samples[s].u << '\n';
      }
    }
    std::ofstream os(dir / "regions.csv");
    os << "# config=" << hash.str() << " seed=" << cfg.seed << '\n';
    os << "region,x,u\n" << std::setprecision(17);
    for (const auto& v : illustrative_regions(cfg.alpha, cfg.x_lo, cfg.x_hi, cfg.u_lo, cfg.u_hi))
      os << v.region << ',' << v.x << ',' << v.u << '\n';
  }
  return result;
}

CsSetup cs_setup(const ExperimentConfig& cfg) {
  CsSetup setup;
  setup.instance = cfg.instance.empty()
                       ? gen_compressed_sensing(cfg.m, cfg.n, cfg.spikes, cfg.noise, cfg.seed)
                       : load_instance(cfg.instance);
  DenseOperator A(setup.instance.A);
  setup.L = operator_norm_sq(A);
  return setup;
}

namespace {

Trace run_projected_baseline(const ExperimentConfig& cfg, const CsSetup& setup,
                             bool accelerated) {
  const auto start = std::chrono::steady_clock::now();
  const DenseOperator A(setup.instance.A);
  const Vector& b = setup.instance.b;
  const L1BallLeastSquares problem(A, b, cfg.nu);
  const LpBall ball = effective_ball(cfg);
  const double L = setup.L;
  const double T = effective_T(cfg);
  const long iters = effective_iters(cfg);
  const Index n = A.cols();

  Trace trace;
  Vector x = Vector::Zero(n);
  Vector prev = x;
  ApgdState acc = apgd_init(x, L);
  for (long k = 0;; ++k) {
    TraceRecord rec;
    rec.k = k;
    rec.T = T;
    rec.fx = problem.objective(x, nullptr);
    rec.min_g = ball.nu - power_sum(x.cwiseAbs(), ball);
    rec.unorm = k == 0 ? 0.0 : (x - prev).norm() / T;
    rec.kkt = kNaN;
    rec.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(rec);
    if (k >= iters) break;
    prev = x;
    if (accelerated) {
      acc = apgd_step(problem, acc, 0.0, L / T);
      x = acc.x;
    } else {
      x = pgd_step(problem, x, T / L);
    }
  }
  trace.status = TerminalStatus::kMaxIter;
  trace.final_state.x = x;
  trace.final_state.u = (x - prev) / T;
  trace.final_state.k = iters;
  trace.final_state.T = T;
  return trace;
}

}  // namespace

Trace run_compressed_sensing(const ExperimentConfig& cfg, const CsSetup& setup) {
  cfg.validate();
  const std::string m = effective_method(cfg);
  if (m == "pgd") return run_projected_baseline(cfg, setup, false);
  if (m == "apgd") return run_projected_baseline(cfg, setup, true);
  const DenseOperator A(setup.instance.A);
  const CsData data{A, setup.instance.b, setup.L};
  return run_lp(data, m == "alg4" ? CsMethod::kAlg4 : CsMethod::kAlg5, effective_ball(cfg),
                solver_params(cfg), effective_iters(cfg),
                Vector::Zero(setup.instance.A.cols()));
}

void violation_series(const Trace& trace, std::vector<long>& ks, std::vector<double>& values) {
  ks.clear();
  values.clear();
  for (const auto& r : trace.records) {
    ks.push_back(r.k);
    values.push_back(std::max(0.0, -r.min_g));
  }
}

std::vector<CsSweepEntry> run_cs_sweep(const ExperimentConfig& cfg,
                                       const std::vector<std::string>& methods,
                                       long slope_k_min, long slope_k_max) {
  const CsSetup setup = cs_setup(cfg);
  std::vector<ExperimentConfig> configs;
  for (const auto& m : methods) {
    ExperimentConfig c = cfg;
    c.method = m;
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<std::future<Trace>> jobs;
  for (const auto& c : configs)
    jobs.push_back(std::async(std::launch::async,
                              [&setup, &c] { return run_compressed_sensing(c, setup); }));
  std::vector<CsSweepEntry> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CsSweepEntry e{methods[i], jobs[i].get(), kNaN};
    std::vector<long> ks;
    std::vector<double> vs;
    violation_series(e.trace, ks, vs);
    e.violation_slope = loglog_slope(ks, vs, slope_k_min, slope_k_max);
    out.push_back(std::move(e));
  }
  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    std::ofstream summary(dir / "summary.txt");
    summary << std::setprecision(17);
    summary << "method,final_k,final_fx,final_min_g,violation_slope,slope_k_min,slope_k_max\n";
    for (std::size_t i = 0; i < out.size(); ++i) {
      save_trace_csv(dir / (out[i].method + ".csv"), out[i].trace, configs[i], cfg.trace_stride);
      const auto& last = out[i].trace.records.back();
      summary << out[i].method << ',' << last.k << ',' << last.fx << ',' << last.min_g << ','
              << out[i].violation_slope << ',' << slope_k_min << ',' << slope_k_max << '\n';
    }
  }
  return out;
}

QuadraticProblem random_qp(Index n, Index n_g, std::uint64_t seed) {
  if (n <= 0 || n_g < 0) throw std::invalid_argument("random_qp: bad dimensions");
  SplitMix64 rng(seed);
  Matrix M(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = rng.normal();
  Matrix Q = M.transpose() * M / static_cast<double>(n) +
             0.1 * Matrix::Identity(n, n);
  Vector c(n);
  for (Index i = 0; i < n; ++i) c(i) = 3.0 * rng.normal();
  Matrix G(n_g, n);
  for (Index i = 0; i < n_g; ++i)
    for (Index j = 0; j < n; ++j) G(i, j) = rng.normal();
  // Gx >= h with h < 0 keeps the origin strictly feasible.
  Vector h(n_g);
  for (Index i = 0; i < n_g; ++i) h(i) = -(0.5 + rng.uniform());
  return QuadraticProblem(std::move(Q), std::move(c), std::move(G), std::move(h));
}

QuadraticProblem load_qp(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("QP file: " + std::string(e.what()));
  }
  const auto vec = [&](const char* key) {
    const auto v = j.at(key).get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
  };
  const auto mat = [&](const char* key, Index cols) {
    const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
    Matrix M(static_cast<Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Index>(rows[i].size()) != cols)
        throw std::invalid_argument(std::string("QP file: ragged matrix ") + key);
      for (Index k = 0; k < cols; ++k) M(static_cast<Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    }
    return M;
  };
  try {
    Vector c = vec("c");
    Matrix Q = mat("Q", c.size());
    Matrix G = j.contains("G") ? mat("G", c.size()) : Matrix(0, c.size());
    Vector h = j.contains("h") ? vec("h") : Vector(0);
    return QuadraticProblem(std::move(Q), std::move(c), std::move(G), std::move(h));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("QP file: " + std::string(e.what()));
  }
}

Trace run_custom_qp(const ExperimentConfig& cfg, const QuadraticProblem& problem) {
  cfg.validate();
  const auto method = parse_method(effective_method(cfg));
  StoppingRule stop;
  stop.max_iter = std::max(1L, effective_iters(cfg));
  return run(problem, *method, solver_params(cfg), stop, Vector::Zero(problem.dim()));
}

}  // namespace velcone
