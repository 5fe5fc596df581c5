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

#include "velcone/polyproj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace velcone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative squared pivot below which an added row counts as dependent on the
// active rows.
constexpr double kPivotTol = 1e-12;
constexpr double kDualBound = 1e12;

// Active rows stored as columns of `normals` with the lower Cholesky factor
// of their Gram matrix.
class ActiveSet {
 public:
  explicit ActiveSet(Index n) : n_(n) {}

  Index size() const { return static_cast<Index>(ids_.size()); }
  const std::vector<Index>& ids() const { return ids_; }

  // Gram-solve for the new normal: returns r = G⁻¹ Nᵀ np and ℓ = L⁻¹ Nᵀ np.
  void solve(const Vector& np, Vector& rd, Vector& ell) const {
    const Index k = size();
    if (k == 0) {
      rd.resize(0);
      ell.resize(0);
      return;
    }
    Vector d = normals_.leftCols(k).transpose() * np;
    const auto L = chol_.topLeftCorner(k, k);
    ell = L.triangularView<Eigen::Lower>().solve(d);
    rd = L.transpose().triangularView<Eigen::Upper>().solve(ell);
  }

  Vector combine(const Vector& coeffs) const {
    if (size() == 0) return Vector::Zero(n_);
    return normals_.leftCols(size()) * coeffs;
  }

  void append(Index id, const Vector& np, const Vector& ell, double pivot) {
    const Index k = size();
    reserve(k + 1);
    normals_.col(k) = np;
    chol_.row(k).head(k) = ell.transpose();
    chol_(k, k) = pivot;
    ids_.push_back(id);
  }

  void remove(Index pos) {
    const Index k = size();
    for (Index j = pos; j + 1 < k; ++j) normals_.col(j) = normals_.col(j + 1);
    ids_.erase(ids_.begin() + pos);
    refactor();
  }

 private:
  void reserve(Index k) {
    if (normals_.cols() >= k) return;
    const Index cap = std::max<Index>(k, 2 * normals_.cols() + 1);
    Matrix grown_normals = Matrix::Zero(n_, cap);
    Matrix grown_chol = Matrix::Zero(cap, cap);
    if (normals_.cols() > 0) {
      grown_normals.leftCols(normals_.cols()) = normals_;
      grown_chol.topLeftCorner(chol_.rows(), chol_.cols()) = chol_;
    }
    normals_.swap(grown_normals);
    chol_.swap(grown_chol);
  }

  void refactor() {
    const Index k = size();
    if (k == 0) return;
    Matrix gram = normals_.leftCols(k).transpose() * normals_.leftCols(k);
    Eigen::LLT<Matrix> llt(gram);
    chol_.topLeftCorner(k, k) = llt.matrixL();
  }

  Index n_;
  Matrix normals_;
  Matrix chol_;
  std::vector<Index> ids_;
};

void check_inputs(const Vector& r, const VelocityCone& cone, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("projection tolerance must be positive");
  if (cone.rows.rows() != cone.rhs.size())
    throw std::invalid_argument("cone rows and right-hand side disagree");
  if (cone.rhs.size() > 0 && cone.rows.cols() != r.size())
    throw std::invalid_argument("cone rows have the wrong length");
  if (!r.allFinite()) throw std::invalid_argument("projection point is not finite");
  if (!cone.rows.allFinite() || !cone.rhs.allFinite())
    throw std::invalid_argument("cone data is not finite");
}

}  // namespace

ProjectionResult project(const Vector& r, const VelocityCone& cone, double tol) {
  check_inputs(r, cone, tol);
  const Index n = r.size();
  const Index m = cone.size();
  const Matrix& W = cone.rows;
  const Vector& w = cone.rhs;

  ProjectionResult out;
  out.v = r;
  out.multipliers = Vector::Zero(m);
  if (m == 0) return out;

  Vector& v = out.v;
  Vector& lambda = out.multipliers;
  std::vector<bool> in_active(static_cast<std::size_t>(m), false);
  ActiveSet active(n);
  const int max_iter = static_cast<int>(10 * (m + n) + 50);

  Vector rd, ell, z;
  for (;;) {
    Vector slack = W * v - w;
    Index p = -1;
    double worst = -tol;
    for (Index i = 0; i < m; ++i) {
      if (!in_active[static_cast<std::size_t>(i)] && slack(i) < worst) {
        worst = slack(i);
        p = i;
      }
    }
    if (p < 0) break;

    const Vector np = W.row(p).transpose();
    const double np_sq = np.squaredNorm();
    for (;;) {
      if (++out.iterations > max_iter)
        throw MaxIterationsError("dual active-set projection did not terminate");

      active.solve(np, rd, ell);
      z = np - active.combine(rd);
      const double z_sq = z.squaredNorm();
      const bool dependent = z_sq <= kPivotTol * np_sq;
      if (dependent) ++out.degenerate_pivots;

      const double sp = W.row(p).dot(v) - w(p);
      const double t_full = dependent ? kInf : std::max(0.0, -sp / z_sq);

      double t_part = kInf;
      Index block = -1;
      for (Index j = 0; j < active.size(); ++j) {
        if (rd(j) <= 0.0) continue;
        const double ratio = lambda(active.ids()[static_cast<std::size_t>(j)]) / rd(j);
        if (ratio < t_part) {
          t_part = ratio;
          block = j;
        }
      }
      if (t_full == kInf && t_part == kInf)
        throw InfeasibleConeError("velocity cone is empty (dual unbounded)");

      const double t = std::min(t_full, t_part);
      if (!dependent) v += t * z;
      for (Index j = 0; j < active.size(); ++j)
        lambda(active.ids()[static_cast<std::size_t>(j)]) -= t * rd(j);
      lambda(p) += t;
      if (lambda.lpNorm<Eigen::Infinity>() > kDualBound)
        throw InfeasibleConeError("velocity cone is empty (dual iterate diverged)");

      if (t_full <= t_part) {
        active.append(p, np, ell, std::sqrt(z_sq));
        in_active[static_cast<std::size_t>(p)] = true;
        break;
      }
      const Index dropped = active.ids()[static_cast<std::size_t>(block)];
      lambda(dropped) = 0.0;
      in_active[static_cast<std::size_t>(dropped)] = false;
      active.remove(block);
    }
  }

  // Recompute v from the multipliers of the final active set; keep the
  // incremental iterate if rounding makes the polished point worse.
  if (active.size() > 0) {
    const Index k = active.size();
    Matrix N(n, k);
    Vector wa(k);
    for (Index j = 0; j < k; ++j) {
      const Index id = active.ids()[static_cast<std::size_t>(j)];
      N.col(j) = W.row(id).transpose();
      wa(j) = w(id);
    }
    Eigen::LLT<Matrix> llt(N.transpose() * N);
    if (llt.info() == Eigen::Success) {
      Vector la = llt.solve(wa - N.transpose() * r);
      Vector vp = r + N * la;
      const double viol = (w - W * vp).maxCoeff();
      if (la.allFinite() && la.minCoeff() >= 0.0 && viol <= tol) {
        v = vp;
        for (Index j = 0; j < k; ++j)
          lambda(active.ids()[static_cast<std::size_t>(j)]) = la(j);
      }
    }
  }
  for (Index i = 0; i < m; ++i)
    if (lambda(i) < 0.0) lambda(i) = 0.0;
  out.active = active.ids();
  std::sort(out.active.begin(), out.active.end());
  return out;
}

ProjectionResult project_halfspace(const Vector& r, const Vector& row, double rhs) {
  const double row_sq = row.squaredNorm();
  if (!(row_sq > 0.0))
    throw std::invalid_argument("half-space normal must be nonzero");
  if (row.size() != r.size())
    throw std::invalid_argument("half-space normal has the wrong length");
  ProjectionResult out;
  const double lam = std::max(0.0, rhs - row.dot(r)) / row_sq;
  out.v = r + lam * row;
  out.multipliers = Vector::Constant(1, lam);
  if (lam > 0.0) out.active.push_back(0);
  return out;
}

double CertificateError::max() const {
  return std::max({primal, dual, stationarity, complementarity});
}

CertificateError certificate_error(const Vector& r, const VelocityCone& cone,
                                   const ProjectionResult& result) {
  CertificateError e;
  if (cone.size() == 0) {
    e.stationarity = (result.v - r).norm();
    return e;
  }
  const Vector slack = cone.rows * result.v - cone.rhs;
  e.primal = std::max(0.0, -slack.minCoeff());
  e.dual = std::max(0.0, -result.multipliers.minCoeff());
  e.stationarity =
      (result.v - r - cone.rows.transpose() * result.multipliers).norm();
  e.complementarity = result.multipliers.cwiseProduct(slack).cwiseAbs().maxCoeff();
  return e;
}

}  // namespace velcone
