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


// velcone command-line harness.
//
//   velcone solve [--qp FILE | --n N --constraints M --seed S] ...
//   velcone bench illustrative ...
//   velcone bench cs ...
//
// Exit codes: 0 converged or iteration budget reached, 2 invalid
// configuration, 3 empty velocity cone, 1 anything else.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "velcone/bench.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;

struct Overrides {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  void apply(velcone::ExperimentConfig& cfg) const {
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) velcone::apply_setting(cfg, key, values.at(key));
  }
};

void add_solver_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--method", "method", "Solver method");
  o.add(app, "--T", "T", "Step size (initial step for --step diminishing)");
  o.add(app, "--step", "step", "constant | diminishing");
  o.add(app, "--s", "s", "Exponent of the diminishing step");
  o.add(app, "--schedule", "schedule",
        "manual | heavy_ball | nesterov_constant | nesterov_varying");
  o.add(app, "--clock", "clock", "scaled | iteration");
  o.add(app, "--alpha", "alpha", "Constraint gain");
  o.add(app, "--delta", "delta", "Damping");
  o.add(app, "--beta", "beta", "Extrapolation");
  o.add(app, "--eps", "eps", "Restitution coefficient");
  o.add(app, "--eps-const", "eps_const", "Activation threshold of the local cone");
  o.add(app, "--mu", "mu", "mu/L for the constant momentum schedules");
  o.add(app, "--iters", "iters", "Iteration budget");
  o.add(app, "--seed", "seed", "Random seed");
  o.add(app, "--out", "out", "Output file or directory");
  o.add(app, "--stride", "trace_stride", "Write every k-th trace row");
}

std::string hex_hash(const velcone::ExperimentConfig& cfg) {
  std::ostringstream os;
  os << std::hex << velcone::config_hash(cfg);
  return os.str();
}

int finish(const velcone::Trace& trace) {
  if (trace.status == velcone::TerminalStatus::kInfeasibleCone) {
    std::cerr << "velcone: " << trace.message << '\n';
    return kExitInfeasible;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated first-order methods with velocity constraints"};
  app.require_subcommand(1);

  std::string config_path;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
  };

  // solve
  auto* solve = app.add_subcommand("solve", "Solve a convex QP with cgd / agd_local / agd_global");
  Overrides solve_o;
  std::string qp_path;
  add_config(solve);
  add_solver_flags(solve, solve_o);
  solve->add_option("--qp", qp_path, "QP in JSON {Q, c, G, h}")->check(CLI::ExistingFile);
  solve_o.add(solve, "--n", "n", "Dimension of the seeded QP");
  solve_o.add(solve, "--constraints", "constraints", "Rows of the seeded QP");

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark experiments");
  bench->require_subcommand(1);
  auto* illus = bench->add_subcommand("illustrative", "Phase portraits of the 1D example");
  Overrides illus_o;
  add_config(illus);
  add_solver_flags(illus, illus_o);
  illus_o.add(illus, "--grid", "grid", "Starting points per axis");

  auto* cs = bench->add_subcommand("cs", "Compressed sensing with an l^p-ball constraint");
  Overrides cs_o;
  std::vector<std::string> cs_methods;
  std::string save_instance_path;
  std::vector<long> slope_window{50, 1000};
  add_config(cs);
  add_solver_flags(cs, cs_o);
  cs->remove_option(cs->get_option("--method"));
  cs_o.options.erase("method");
  cs->add_option("--method", cs_methods,
                 "alg4, alg5, pgd, apgd or all; several methods run concurrently")
      ->delimiter(',');
  cs_o.add(cs, "--p", "p", "Exponent of the l^p ball, in (0, 1]");
  cs_o.add(cs, "--nu", "nu", "Ball radius");
  cs_o.add(cs, "--Delta", "Delta", "Smoothing threshold");
  cs_o.add(cs, "--m", "m", "Measurements");
  cs_o.add(cs, "--n", "n", "Unknowns");
  cs_o.add(cs, "--spikes", "spikes", "Nonzeros of the planted signal");
  cs_o.add(cs, "--noise", "noise", "Noise scale");
  cs_o.add(cs, "--instance", "instance", "Load the instance from a file");
  cs->add_option("--save-instance", save_instance_path, "Write the instance and exit");
  cs->add_option("--slope-window", slope_window, "k range of the violation slope fit")
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  velcone::ExperimentConfig cfg;
  try {
    if (*solve) {
      cfg.experiment = velcone::Experiment::kCustomQp;
      cfg.n = 20;
      if (!config_path.empty()) velcone::load_config(config_path, cfg);
      solve_o.apply(cfg);
      cfg.experiment = velcone::Experiment::kCustomQp;
      cfg.validate();
      const velcone::QuadraticProblem problem =
          qp_path.empty() ? velcone::random_qp(cfg.n, cfg.constraints, cfg.seed)
                          : velcone::load_qp(qp_path);
      const velcone::Trace trace = velcone::run_custom_qp(cfg, problem);
      if (cfg.out.empty())
        velcone::write_trace_csv(std::cout, trace, cfg, cfg.trace_stride);
      else
        velcone::save_trace_csv(cfg.out, trace, cfg, cfg.trace_stride);
      std::cerr << "status=" << velcone::to_string(trace.status)
                << " k=" << trace.final_state.k << " config=" << hex_hash(cfg) << '\n';
      return finish(trace);
    }
    if (*illus) {
      cfg.experiment = velcone::Experiment::kIllustrative;
      if (!config_path.empty()) velcone::load_config(config_path, cfg);
      illus_o.apply(cfg);
      cfg.experiment = velcone::Experiment::kIllustrative;
      const auto result = velcone::run_illustrative(cfg);
      int converged = 0;
      for (const auto& t : result.trajectories)
        converged += t.status == velcone::TerminalStatus::kConverged ? 1 : 0;
      std::cout << "trajectories=" << result.trajectories.size() << " converged=" << converged
                << " config=" << hex_hash(cfg) << '\n';
      for (const auto& t : result.trajectories)
        if (t.status == velcone::TerminalStatus::kInfeasibleCone) return kExitInfeasible;
      return 0;
    }
    if (*cs) {
      cfg.experiment = velcone::Experiment::kCompressedSensing;
      if (!config_path.empty()) velcone::load_config(config_path, cfg);
      cs_o.apply(cfg);
      cfg.experiment = velcone::Experiment::kCompressedSensing;
      if (!save_instance_path.empty()) {
        cfg.validate();
        velcone::save_instance(save_instance_path, velcone::cs_setup(cfg).instance);
        return 0;
      }
      std::vector<std::string> methods;
      for (const auto& m : cs_methods) {
        if (m == "all")
          methods.insert(methods.end(), {"alg4", "alg5", "apgd", "pgd"});
        else
          methods.push_back(m);
      }
      if (methods.empty()) methods.push_back(velcone::effective_method(cfg));
      if (methods.size() == 1) {
        cfg.method = methods.front();
        cfg.validate();
        const auto setup = velcone::cs_setup(cfg);
        const auto trace = velcone::run_compressed_sensing(cfg, setup);
        if (cfg.out.empty())
          velcone::write_trace_csv(std::cout, trace, cfg, cfg.trace_stride);
        else
          velcone::save_trace_csv(cfg.out, trace, cfg, cfg.trace_stride);
        return finish(trace);
      }
      const auto entries =
          velcone::run_cs_sweep(cfg, methods, slope_window[0], slope_window[1]);
      std::printf("%-6s %24s %24s %12s\n", "method", "fx", "min_g", "slope");
      for (const auto& e : entries) {
        const auto& last = e.trace.records.back();
        std::printf("%-6s %24.17g %24.17g %12.4g\n", e.method.c_str(), last.fx, last.min_g,
                    e.violation_slope);
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "velcone: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "velcone: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
