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


#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "velcone/polyproj.hpp"

namespace velcone {
namespace {

VelocityCone make_cone(const Matrix& W, const Vector& w) {
  VelocityCone c;
  c.rows = W;
  c.rhs = w;
  return c;
}

VelocityCone random_cone(std::mt19937_64& rng, Index n, Index m, bool through_origin) {
  std::normal_distribution<double> N;
  Matrix W(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) W(i, j) = N(rng);
  Vector w(m);
  for (Index i = 0; i < m; ++i) w(i) = through_origin ? 0.0 : N(rng);
  return make_cone(W, w);
}

Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> N;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = scale * N(rng);
  return v;
}

TEST(Project, EmptyConeIsIdentity) {
  Vector r(3);
  r << 1, -2, 3;
  const auto res = project(r, VelocityCone{Matrix(0, 3), Vector(0), {}});
  EXPECT_EQ(res.v, r);
  EXPECT_TRUE(res.active.empty());
}

TEST(Project, HalfspaceClosedForm) {
  Vector r(2);
  r << -1.0, 0.5;
  Vector row(2);
  row << 1.0, 0.0;
  const auto res = project(r, make_cone(row.transpose(), Vector::Constant(1, 0.0)));
  EXPECT_NEAR(res.v(0), 0.0, 1e-15);
  EXPECT_NEAR(res.v(1), 0.5, 1e-15);
  EXPECT_NEAR(res.multipliers(0), 1.0, 1e-15);
  ASSERT_EQ(res.active.size(), 1u);
  const auto hs = project_halfspace(r, row, 0.0);
  EXPECT_LE((hs.v - res.v).norm(), 1e-15);
  EXPECT_THROW(project_halfspace(r, Vector::Zero(2), 0.0), std::invalid_argument);
}

TEST(Project, InteriorPointUnchanged) {
  Matrix W(2, 2);
  W << 1, 0, 0, 1;
  Vector r(2);
  r << 2, 3;
  const auto res = project(r, make_cone(W, Vector::Zero(2)));
  EXPECT_EQ(res.v, r);
  EXPECT_EQ(res.multipliers.norm(), 0.0);
}

TEST(Project, OrthantCorner) {
  Vector r(3);
  r << -1, -2, 0.5;
  const auto res = project(r, make_cone(Matrix::Identity(3, 3), Vector::Zero(3)));
  EXPECT_NEAR(res.v(0), 0.0, 1e-15);
  EXPECT_NEAR(res.v(1), 0.0, 1e-15);
  EXPECT_NEAR(res.v(2), 0.5, 1e-15);
  EXPECT_EQ(res.active, (std::vector<Index>{0, 1}));
}

TEST(Project, DuplicateRowsAreDegenerateButSolved) {
  Matrix W(3, 2);
  W << 1, 0, 1, 0, 2, 0;
  Vector w(3);
  w << 1, 1, 2;
  Vector r(2);
  r << -1, 4;
  const auto res = project(r, make_cone(W, w));
  EXPECT_NEAR(res.v(0), 1.0, 1e-12);
  EXPECT_NEAR(res.v(1), 4.0, 1e-12);
  EXPECT_LE(certificate_error(r, make_cone(W, w), res).max(), 1e-10);
}

TEST(Project, InfeasibleConeThrows) {
  Matrix W(2, 1);
  W << 1, -1;
  Vector w(2);
  w << 1, 1;  // v >= 1 and v <= −1
  EXPECT_THROW(project(Vector::Zero(1), make_cone(W, w)), InfeasibleConeError);
}

TEST(Project, RejectsMalformedInput) {
  Matrix W(2, 2);
  W.setIdentity();
  EXPECT_THROW(project(Vector::Zero(3), make_cone(W, Vector::Zero(2))), std::invalid_argument);
  EXPECT_THROW(project(Vector::Zero(2), make_cone(W, Vector::Zero(3))), std::invalid_argument);
  Vector r = Vector::Zero(2);
  r(0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(project(r, make_cone(W, Vector::Zero(2))), std::invalid_argument);
  EXPECT_THROW(project(Vector::Zero(2), make_cone(W, Vector::Zero(2)), 0.0),
               std::invalid_argument);
}

TEST(Project, MatchesEnumerationOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6), rows(1, 5);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const Index n = dim(rng), m = rows(rng);
    const VelocityCone cone = random_cone(rng, n, m, false);
    const Vector r = random_vector(rng, n, 2.0);
    const auto expected = oracle::enumerate_projection(r, cone);
    if (!expected) {
      EXPECT_THROW(project(r, cone), InfeasibleConeError);
      continue;
    }
    const auto res = project(r, cone);
    EXPECT_LE((res.v - *expected).norm(), 1e-8) << "trial " << t;
    EXPECT_LE(certificate_error(r, cone, res).max(), 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(ProjectProperties, NonexpansiveIdempotentHomogeneous) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const Index n = 4, m = 6;
    const VelocityCone cone = random_cone(rng, n, m, true);
    const Vector a = random_vector(rng, n), b = random_vector(rng, n);
    const Vector pa = project(a, cone).v, pb = project(b, cone).v;
    EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-10);
    EXPECT_LE((project(pa, cone).v - pa).norm(), 1e-10);
    // Cone through the origin: positively homogeneous.
    EXPECT_LE((project(3.5 * a, cone).v - 3.5 * pa).norm(), 1e-9);
  }
}

TEST(ProjectProperties, RowPermutationEquivariance) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const Index n = 5, m = 5;
    const VelocityCone cone = random_cone(rng, n, m, false);
    const Vector r = random_vector(rng, n, 2.0);
    std::vector<Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    VelocityCone shuffled = cone;
    for (Index i = 0; i < m; ++i) {
      shuffled.rows.row(i) = cone.rows.row(perm[static_cast<std::size_t>(i)]);
      shuffled.rhs(i) = cone.rhs(perm[static_cast<std::size_t>(i)]);
    }
    try {
      const auto a = project(r, cone);
      const auto b = project(r, shuffled);
      EXPECT_LE((a.v - b.v).norm(), 1e-9);
    } catch (const InfeasibleConeError&) {
      EXPECT_THROW(project(r, shuffled), InfeasibleConeError);
    }
  }
}

TEST(Certificate, DetectsWrongAnswer) {
  Matrix W(1, 2);
  W << 1, 0;
  const VelocityCone cone = make_cone(W, Vector::Zero(1));
  Vector r(2);
  r << -1, 0;
  ProjectionResult bogus;
  bogus.v = r;
  bogus.multipliers = Vector::Zero(1);
  EXPECT_NEAR(certificate_error(r, cone, bogus).primal, 1.0, 1e-15);
}

}  // namespace
}  // namespace velcone
