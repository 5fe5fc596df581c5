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


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "velcone/bench.hpp"
#include "velcone/core.hpp"
#include "velcone/lpcs.hpp"
#include "velcone/polyproj.hpp"
#include "velcone/solvers.hpp"
#include "velcone/wsimplex.hpp"

namespace py = pybind11;
using namespace velcone;

namespace {

py::dict trace_to_dict(const Trace& trace) {
  std::vector<long> k;
  std::vector<double> T, fx, min_g, unorm, kkt;
  for (const auto& r : trace.records) {
    k.push_back(r.k);
    T.push_back(r.T);
    fx.push_back(r.fx);
    min_g.push_back(r.min_g);
    unorm.push_back(r.unorm);
    kkt.push_back(r.kkt);
  }
  py::dict d;
  d["k"] = k;
  d["T"] = T;
  d["fx"] = fx;
  d["min_g"] = min_g;
  d["unorm"] = unorm;
  d["kkt"] = kkt;
  d["status"] = std::string(to_string(trace.status));
  d["x"] = trace.final_state.x;
  d["u"] = trace.final_state.u;
  d["message"] = trace.message;
  return d;
}

ExperimentConfig config_from(const py::dict& settings, Experiment experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  for (const auto& [key, value] : settings)
    apply_setting(cfg, py::str(key), py::str(value));
  cfg.experiment = experiment;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_velcone, m) {
  m.doc() = "Accelerated first-order methods with velocity constraints";

  py::register_exception<InfeasibleConeError>(m, "InfeasibleConeError");

  py::class_<VelocityCone>(m, "VelocityCone")
      .def(py::init([](Matrix rows, Vector rhs) {
             VelocityCone c;
             c.rows = std::move(rows);
             c.rhs = std::move(rhs);
             return c;
           }),
           py::arg("rows"), py::arg("rhs"))
      .def_readonly("rows", &VelocityCone::rows)
      .def_readonly("rhs", &VelocityCone::rhs);

  py::class_<ProjectionResult>(m, "ProjectionResult")
      .def_readonly("v", &ProjectionResult::v)
      .def_readonly("multipliers", &ProjectionResult::multipliers)
      .def_readonly("active", &ProjectionResult::active)
      .def_readonly("iterations", &ProjectionResult::iterations);

  m.def("project", &project, py::arg("r"), py::arg("cone"),
        py::arg("tol") = kDefaultProjectionTol,
        "Euclidean projection of r onto {v : rows v >= rhs}.");

  m.def(
      "project_weighted_simplex",
      [](Vector q, std::vector<bool> nonneg, Vector weights, double budget) {
        return project_weighted_simplex({std::move(q), std::move(nonneg), std::move(weights), budget});
      },
      py::arg("q"), py::arg("nonneg"), py::arg("weights"), py::arg("budget"));
  m.def("project_l1_ball", &project_l1_ball, py::arg("q"), py::arg("nu"));

  m.def(
      "power_approx",
      [](double x, double p, double delta) { return power_approx(x, LpBall{p, 1.0, delta}); },
      py::arg("x"), py::arg("p"), py::arg("delta"));
  m.def(
      "power_approx_grad",
      [](double x, double p, double delta) {
        return power_approx_grad(x, LpBall{p, 1.0, delta});
      },
      py::arg("x"), py::arg("p"), py::arg("delta"));

  py::class_<QuadraticProblem>(m, "QuadraticProblem")
      .def(py::init<Matrix, Vector, Matrix, Vector>(), py::arg("Q"), py::arg("c"),
           py::arg("G"), py::arg("h"))
      .def("objective", [](const QuadraticProblem& p, const Vector& x) {
        return p.objective(x, nullptr);
      })
      .def("constraints", [](const QuadraticProblem& p, const Vector& x) {
        Vector g;
        p.constraints(x, g);
        return g;
      });

  m.def("random_qp", &random_qp, py::arg("n"), py::arg("n_g"), py::arg("seed"));

  m.def(
      "stationarity_residual",
      [](const QuadraticProblem& p, const Vector& x, double eps_const) {
        auto r = stationarity_residual(p, x, eps_const);
        return py::make_tuple(r.residual, r.multipliers);
      },
      py::arg("problem"), py::arg("x"), py::arg("eps_const") = 0.0,
      "Returns (residual, multipliers).");

  m.def(
      "solve_qp",
      [](const QuadraticProblem& problem, const py::dict& settings) {
        const ExperimentConfig cfg = config_from(settings, Experiment::kCustomQp);
        Trace trace;
        {
          py::gil_scoped_release release;
          trace = run_custom_qp(cfg, problem);
        }
        return trace_to_dict(trace);
      },
      py::arg("problem"), py::arg("settings") = py::dict(),
      "Runs cgd / agd_local / agd_global; settings use the CLI config keys.");

  m.def(
      "gen_compressed_sensing",
      [](Index rows, Index cols, Index spikes, double noise, std::uint64_t seed) {
        CsInstance inst = gen_compressed_sensing(rows, cols, spikes, noise, seed);
        return py::make_tuple(inst.A, inst.b, inst.x_true);
      },
      py::arg("m"), py::arg("n"), py::arg("spikes"), py::arg("noise_scale"),
      py::arg("seed"));

  m.def(
      "run_compressed_sensing",
      [](const py::dict& settings) {
        const ExperimentConfig cfg = config_from(settings, Experiment::kCompressedSensing);
        cfg.validate();
        Trace trace;
        {
          py::gil_scoped_release release;
          trace = run_compressed_sensing(cfg, cs_setup(cfg));
        }
        return trace_to_dict(trace);
      },
      py::arg("settings") = py::dict(),
      "Runs alg4 / alg5 / pgd / apgd on the seeded instance; settings use the CLI config keys.");

  m.def(
      "illustrative_trajectory",
      [](double x0, double u0, const py::dict& settings) {
        const ExperimentConfig cfg = config_from(settings, Experiment::kIllustrative);
        cfg.validate();
        const Trajectory t = illustrative_trajectory(cfg, x0, u0);
        std::vector<double> ts, xs, us;
        for (const auto& s : t.samples) {
          ts.push_back(s.t);
          xs.push_back(s.x);
          us.push_back(s.u);
        }
        py::dict d;
        d["t"] = ts;
        d["x"] = xs;
        d["u"] = us;
        d["status"] = std::string(to_string(t.status));
        return d;
      },
      py::arg("x0"), py::arg("u0"), py::arg("settings") = py::dict());
}
