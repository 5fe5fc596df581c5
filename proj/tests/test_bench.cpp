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


#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "velcone/bench.hpp"

namespace velcone {
namespace {

BoxQuadratic random_box_qp(std::uint64_t seed, Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Matrix M(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = N(rng);
  Vector c(n);
  for (Index i = 0; i < n; ++i) c(i) = 3.0 * N(rng);
  return BoxQuadratic(M.transpose() * M / n + 0.05 * Matrix::Identity(n, n), c,
                      Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
}

double max_eig(const Matrix& Q) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().maxCoeff();
}

class Identity final : public ProjectedProblem {
 public:
  Identity(Matrix Q, Vector c) : Q_(std::move(Q)), c_(std::move(c)) {}
  Index dim() const override { return c_.size(); }
  double objective(const Vector& x, Vector* grad) const override {
    if (grad) *grad = Q_ * x + c_;
    return 0.5 * x.dot(Q_ * x) + c_.dot(x);
  }
  Vector project(const Vector& x) const override { return x; }

 private:
  Matrix Q_;
  Vector c_;
};

TEST(Pgd, UnconstrainedIsGradientDescent) {
  const Matrix Q = Vector::LinSpaced(4, 1.0, 4.0).asDiagonal();
  const Identity prob(Q, Vector::Zero(4));
  Vector x = Vector::Ones(4);
  for (int k = 0; k < 10; ++k) {
    const Vector next = pgd_step(prob, x, 0.25);
    EXPECT_LE((next - (x - 0.25 * Q * x)).norm(), 1e-15);
    EXPECT_LE(next.norm(), x.norm() * 0.75 + 1e-15);
    x = next;
  }
}

TEST(Pgd, L1BallIterateStaysOnBall) {
  const CsInstance inst = gen_compressed_sensing(10, 20, 3, 0.5, 5);
  const DenseOperator A(inst.A);
  const L1BallLeastSquares prob(A, inst.b, 1.0);
  Vector x = Vector::Zero(20);
  x(0) = 1.0;
  const double L = operator_norm_sq(A);
  for (int k = 0; k < 50; ++k) {
    x = pgd_step(prob, x, 1.0 / L);
    EXPECT_LE(x.lpNorm<1>(), 1.0 + 1e-10);
  }
  EXPECT_NEAR(x.lpNorm<1>(), 1.0, 1e-10);
}

TEST(Pgd, MatchesEnumerationOracleOnBox) {
  const BoxQuadratic prob = random_box_qp(3, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (int t = 0; t < 30; ++t) {
    Vector x(3);
    x << N(rng), N(rng), N(rng);
    Vector grad;
    prob.objective(x, &grad);
    const Vector target = x - 0.3 * grad;
    Matrix W(6, 3);
    W << Matrix::Identity(3, 3), -Matrix::Identity(3, 3);
    const auto expected = oracle::enumerate_projection(target, W, Vector::Constant(6, -1.0));
    ASSERT_TRUE(expected.has_value());
    EXPECT_LE((pgd_step(prob, x, 0.3) - *expected).norm(), 1e-12);
  }
}

TEST(Apgd, IdentityProjectionIsNesterov) {
  const Matrix Q = Vector::LinSpaced(5, 0.1, 2.0).asDiagonal();
  const Vector c = Vector::LinSpaced(5, -1.0, 1.0);
  const Identity prob(Q, c);
  const double L = 2.0, mu = 0.1;
  ApgdState s = apgd_init(Vector::Ones(5), L);
  // Constant Step Scheme I written out directly.
  Vector x = Vector::Ones(5), v = x;
  double gamma = L;
  for (int k = 0; k < 100; ++k) {
    s = apgd_step(prob, s, mu, L);
    const double a = (-(gamma - mu) + std::sqrt((gamma - mu) * (gamma - mu) + 4 * L * gamma)) / (2 * L);
    const double gn = (1 - a) * gamma + a * mu;
    const Vector y = (a * gamma * v + gn * x) / (gamma + a * mu);
    const Vector g = Q * y + c;
    x = y - g / L;
    v = ((1 - a) * gamma * v + a * mu * y - a * g) / gn;
    gamma = gn;
    ASSERT_LE((s.x - x).norm(), 1e-12);
    ASSERT_LE((s.v - v).norm(), 1e-12);
  }
}

TEST(Apgd, FewerIterationsThanPgdOnBox) {
  const BoxQuadratic prob = random_box_qp(11, 10);
  // Reference minimizer by long pgd.
  Matrix Q(10, 10);
  for (Index j = 0; j < 10; ++j) {
    Vector e = Vector::Unit(10, j), g0, g1;
    prob.objective(e, &g1);
    prob.objective(Vector::Zero(10), &g0);
    Q.col(j) = g1 - g0;
  }
  const double L = max_eig(Q);
  const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().minCoeff();
  const auto residual = [&](const Vector& x) {
    Vector g;
    prob.objective(x, &g);
    return (x - prob.project(x - g)).norm();
  };
  Vector x = Vector::Zero(10);
  int pgd_iters = 0;
  while (residual(x) > 1e-9 && pgd_iters < 200000) {
    x = pgd_step(prob, x, 1.0 / L);
    ++pgd_iters;
  }
  ApgdState s = apgd_init(Vector::Zero(10), L);
  int apgd_iters = 0;
  while (residual(s.x) > 1e-9 && apgd_iters < 200000) {
    s = apgd_step(prob, s, mu, L);
    ++apgd_iters;
  }
  EXPECT_LE((s.x - x).norm(), 1e-7);
  EXPECT_LT(apgd_iters, pgd_iters);
}

TEST(Apgd, FeasibleEveryIterationOnL1Ball) {
  const CsInstance inst = gen_compressed_sensing(20, 60, 4, 0.5, 2);
  const DenseOperator A(inst.A);
  const L1BallLeastSquares prob(A, inst.b, 3.0);
  ApgdState s = apgd_init(Vector::Zero(60), operator_norm_sq(A));
  for (int k = 0; k < 200; ++k) {
    s = apgd_step(prob, s, 0.0, operator_norm_sq(A));
    EXPECT_LE(s.x.lpNorm<1>(), 3.0 + 1e-10);
  }
}

TEST(Config, ParseOverrideAndHash) {
  ExperimentConfig cfg;
  std::istringstream is("# comment\nmethod = alg5\np=0.8   # trailing\n\nnu = 10\n");
  read_config(is, cfg);
  EXPECT_EQ(*cfg.method, "alg5");
  EXPECT_EQ(cfg.p, 0.8);
  EXPECT_EQ(cfg.nu, 10.0);
  EXPECT_EQ(effective_T(cfg), 1.0);
  EXPECT_EQ(effective_Delta(cfg), 1e-3);
  const auto h = config_hash(cfg);
  apply_setting(cfg, "out", "/tmp/x");
  EXPECT_EQ(config_hash(cfg), h);
  apply_setting(cfg, "seed", "2");
  EXPECT_NE(config_hash(cfg), h);
  EXPECT_THROW(apply_setting(cfg, "bogus", "1"), std::invalid_argument);
  EXPECT_THROW(apply_setting(cfg, "p", "abc"), std::invalid_argument);
  EXPECT_THROW(apply_setting(cfg, "method", "sgd"), std::invalid_argument);
  std::istringstream bad("novalue\n");
  EXPECT_THROW(read_config(bad, cfg), std::invalid_argument);
}

TEST(Config, Defaults) {
  ExperimentConfig cs;
  EXPECT_EQ(effective_method(cs), "alg4");
  EXPECT_EQ(effective_T(cs), 1.8);
  cs.method = "alg5";
  EXPECT_EQ(effective_T(cs), 2.0);
  EXPECT_EQ(effective_schedule(cs), "nesterov_varying");
  EXPECT_EQ(effective_iters(cs), 400);
  ExperimentConfig il;
  il.experiment = Experiment::kIllustrative;
  EXPECT_EQ(effective_method(il), "agd_local");
  EXPECT_EQ(effective_T(il), 0.1);
  EXPECT_EQ(effective_schedule(il), "manual");
}

TEST(Config, MethodExperimentCompatibility) {
  ExperimentConfig cfg;
  cfg.method = "agd_local";
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.experiment = Experiment::kIllustrative;
  EXPECT_NO_THROW(cfg.validate());
  cfg.method = "alg4";
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  ExperimentConfig pgd;
  pgd.method = "pgd";
  pgd.p = 0.8;
  EXPECT_THROW(pgd.validate(), std::invalid_argument);
}

TEST(Csv, FormatAndReproducibility) {
  ExperimentConfig cfg;
  cfg.m = 10;
  cfg.n = 30;
  cfg.spikes = 3;
  cfg.nu = 2.0;
  cfg.iters = 25;
  const CsSetup setup = cs_setup(cfg);
  const auto numeric = [&](const Trace& t) {
    std::ostringstream os;
    write_trace_csv(os, t, cfg);
    // Drop the timing column.
    std::istringstream in(os.str());
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return std::make_pair(os.str(), out);
  };
  const auto a = numeric(run_compressed_sensing(cfg, setup));
  const auto b = numeric(run_compressed_sensing(cfg, cs_setup(cfg)));
  EXPECT_EQ(a.second, b.second);
  std::istringstream in(a.first);
  std::string header, columns, row;
  std::getline(in, header);
  std::getline(in, columns);
  EXPECT_EQ(header.rfind("# config=", 0), 0u);
  EXPECT_NE(header.find(" seed=1"), std::string::npos);
  EXPECT_EQ(columns, "k,fx,min_g,unorm,kkt,elapsed_s");
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  EXPECT_EQ(rows, 26);
}

TEST(Csv, StrideKeepsLastRow) {
  Trace t;
  for (long k = 0; k < 10; ++k) t.records.push_back(TraceRecord{k, 1.0, 0.0, 0.0, 0.0, 0.0, 0, 0.0});
  std::ostringstream os;
  write_trace_csv(os, t, ExperimentConfig{}, 4);
  std::istringstream in(os.str());
  std::string line;
  std::vector<std::string> ks;
  while (std::getline(in, line))
    if (line[0] != '#' && line[0] != 'k') ks.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(ks, (std::vector<std::string>{"0", "4", "8", "9"}));
}

TEST(Illustrative, RegionsAndTrajectories) {
  const auto verts = illustrative_regions(0.5, -3, 5, -3, 3);
  for (const auto& v : verts) {
    if (v.region == 1) {
      EXPECT_LE(v.x, 1e-12);
      EXPECT_LE(v.u + 0.5 * v.x, 1e-12);
    } else {
      EXPECT_GE(v.x, 2.0 - 1e-12);
      EXPECT_LE(-v.u + 0.5 * (2.0 - v.x), 1e-12);
    }
  }
  ExperimentConfig cfg;
  cfg.experiment = Experiment::kIllustrative;
  cfg.grid = 3;
  const auto res = run_illustrative(cfg);
  ASSERT_EQ(res.trajectories.size(), 9u);
  for (const auto& t : res.trajectories) {
    EXPECT_EQ(t.status, TerminalStatus::kConverged);
    EXPECT_LE(std::abs(t.samples.back().x), 1e-6);
  }
}

TEST(CsSweep, LargeRadiusNeverActivates) {
  ExperimentConfig cfg;
  cfg.m = 20;
  cfg.n = 40;
  cfg.spikes = 3;
  cfg.nu = 1e6;
  cfg.iters = 50;
  const auto entries = run_cs_sweep(cfg, {"alg4", "alg5"}, 10, 50);
  for (const auto& e : entries)
    for (const auto& r : e.trace.records) EXPECT_GT(r.min_g, 0.0);
}

TEST(Qp, RandomQpIsStronglyConvexWithFeasibleOrigin) {
  const QuadraticProblem qp = random_qp(6, 9, 4);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(qp.hessian()).eigenvalues().minCoeff(), 0.09);
  Vector g;
  qp.constraints(Vector::Zero(6), g);
  EXPECT_GT(g.minCoeff(), 0.0);
}

}  // namespace
}  // namespace velcone
