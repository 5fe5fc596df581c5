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


#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "velcone/wsimplex.hpp"

namespace velcone {
namespace {

WeightedSimplexInstance instance(std::initializer_list<double> q, std::vector<bool> nonneg,
                                 std::initializer_list<double> w, double budget) {
  WeightedSimplexInstance inst;
  inst.q = Eigen::Map<const Vector>(q.begin(), static_cast<Index>(q.size()));
  inst.weights = Eigen::Map<const Vector>(w.begin(), static_cast<Index>(w.size()));
  inst.nonneg = std::move(nonneg);
  inst.budget = budget;
  return inst;
}

WeightedSimplexInstance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 8);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.0, 2.0);
  std::bernoulli_distribution coin(0.7), zero_weight(0.1);
  const Index n = dim(rng);
  WeightedSimplexInstance inst;
  inst.q.resize(n);
  inst.weights.resize(n);
  inst.nonneg.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    inst.q(i) = 2.0 * N(rng);
    inst.weights(i) = zero_weight(rng) ? 0.0 : U(rng);
    inst.nonneg[static_cast<std::size_t>(i)] = coin(rng);
  }
  inst.budget = U(rng);
  return inst;
}

TEST(WeightedSimplex, BudgetInactive) {
  const auto inst = instance({0.2, -1.0, 0.3}, {true, true, true}, {1, 1, 1}, 1.0);
  const Vector xi = project_weighted_simplex(inst);
  EXPECT_DOUBLE_EQ(xi(0), 0.2);
  EXPECT_DOUBLE_EQ(xi(1), 0.0);
  EXPECT_DOUBLE_EQ(xi(2), 0.3);
}

TEST(WeightedSimplex, UnitSimplexThreshold) {
  // Projection of (2, 1, 0) on {ξ >= 0, Σξ <= 1}: threshold 1 gives (1, 0, 0).
  const auto inst = instance({2.0, 1.0, 0.0}, {true, true, true}, {1, 1, 1}, 1.0);
  const Vector xi = project_weighted_simplex(inst);
  EXPECT_NEAR(xi(0), 1.0, 1e-15);
  EXPECT_NEAR(xi(1), 0.0, 1e-15);
  EXPECT_NEAR(xi(2), 0.0, 1e-15);
}

TEST(WeightedSimplex, FreeCoordinatesShiftByMultiplier) {
  // No sign constraints: ξ = q − λw with wᵀξ = ν̄.
  const auto inst = instance({1.0, 2.0}, {false, false}, {1.0, 2.0}, 1.0);
  const Vector xi = project_weighted_simplex(inst);
  const double lambda = (1.0 + 4.0 - 1.0) / 5.0;
  EXPECT_NEAR(xi(0), 1.0 - lambda, 1e-15);
  EXPECT_NEAR(xi(1), 2.0 - 2.0 * lambda, 1e-15);
}

TEST(WeightedSimplex, ZeroWeightCoordinateOnlyClamped) {
  const auto inst = instance({-0.5, 3.0, 1.0}, {true, true, true}, {0.0, 1.0, 1.0}, 1.0);
  const Vector xi = project_weighted_simplex(inst);
  EXPECT_DOUBLE_EQ(xi(0), 0.0);
  EXPECT_NEAR(xi(1), 1.0, 1e-15);
  EXPECT_NEAR(xi(2), 0.0, 1e-15);
}

TEST(WeightedSimplex, RejectsBadInput) {
  auto inst = instance({1.0, 2.0}, {true, true}, {1.0, -1.0}, 1.0);
  EXPECT_THROW(project_weighted_simplex(inst), std::invalid_argument);
  inst = instance({1.0, 2.0}, {true}, {1.0, 1.0}, 1.0);
  EXPECT_THROW(project_weighted_simplex(inst), std::invalid_argument);
  inst = instance({1.0}, {true}, {std::numeric_limits<double>::infinity()}, 1.0);
  EXPECT_THROW(project_weighted_simplex(inst), std::invalid_argument);
}

TEST(WeightedSimplex, MatchesEnumerationOracle) {
  std::mt19937_64 rng(77);
  int compared = 0;
  for (int t = 0; t < 400; ++t) {
    const auto inst = random_instance(rng);
    const auto poly = oracle::weighted_simplex_polyhedron(inst);
    const auto expected = oracle::enumerate_projection(inst.q, poly);
    ASSERT_TRUE(expected.has_value());
    EXPECT_LE((project_weighted_simplex(inst) - *expected).norm(), 1e-8) << "trial " << t;
    ++compared;
  }
  EXPECT_EQ(compared, 400);
}

TEST(WeightedSimplex, PermutationEquivariant) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(rng);
    const Vector base = project_weighted_simplex(inst);
    const Index n = inst.q.size();
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = n - 1 - i;
    WeightedSimplexInstance rev = inst;
    for (Index i = 0; i < n; ++i) {
      const auto j = perm[static_cast<std::size_t>(i)];
      rev.q(i) = inst.q(j);
      rev.weights(i) = inst.weights(j);
      rev.nonneg[static_cast<std::size_t>(i)] = inst.nonneg[static_cast<std::size_t>(j)];
    }
    const Vector out = project_weighted_simplex(rev);
    for (Index i = 0; i < n; ++i)
      EXPECT_NEAR(out(i), base(perm[static_cast<std::size_t>(i)]), 1e-12);
  }
}

TEST(L1Ball, InsideUnchangedAndBoundaryMatchesOracle) {
  Vector q(3);
  q << 0.2, -0.3, 0.1;
  EXPECT_LE((project_l1_ball(q, 1.0) - q).norm(), 0.0);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> N;
  for (int t = 0; t < 100; ++t) {
    Vector z(4);
    for (Index i = 0; i < 4; ++i) z(i) = 2.0 * N(rng);
    const double nu = 1.0;
    // The projection lies in the orthant of z, where the ball is the single
    // row sign(z)ᵀx <= ν.
    Vector sign = z.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    const Vector p = project_l1_ball(z, nu);
    EXPECT_LE(p.lpNorm<1>(), nu + 1e-12);
    EXPECT_GE((p.array() * sign.array()).minCoeff(), -1e-15);
    const auto expected = oracle::enumerate_projection(
        z, (Matrix(5, 4) << -sign.transpose(), Matrix(sign.asDiagonal())).finished(),
        (Vector(5) << -nu, 0, 0, 0, 0).finished());
    ASSERT_TRUE(expected.has_value());
    EXPECT_LE((p - *expected).norm(), 1e-9);
  }
}

TEST(L1Ball, RejectsNegativeRadius) {
  EXPECT_THROW(project_l1_ball(Vector::Zero(2), -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace velcone
