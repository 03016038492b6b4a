#include "lfa/simplex.hpp"

#include <fmt/format.h>

#include <vector>

namespace lfa {

namespace {

constexpr double kPivotTol = 1e-12;

struct Tableau {
  Mat t;                  // m rows of constraints + last row for the objective
  std::vector<int> basis;
  int pivots = 0;

  Eigen::Index m() const { return t.rows() - 1; }
  Eigen::Index rhs() const { return t.cols() - 1; }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t.row(row) /= t(row, col);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i != row && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = static_cast<int>(col);
    ++pivots;
  }

  // Objective row holds reduced costs; minimise. allowed[j] false bars column j.
  void run(const std::vector<bool>& allowed) {
    const Eigen::Index obj = m();
    for (int iter = 0; iter < 100000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < rhs(); ++j) {
        if (allowed[static_cast<std::size_t>(j)] && t(obj, j) < -1e-11) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m(); ++i) {
        if (t(i, enter) > kPivotTol) {
          const double ratio = t(i, rhs()) / t(i, enter);
          if (leave < 0 || ratio < best - 1e-15 ||
              (ratio <= best + 1e-15 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) throw InternalFault("simplex: unbounded program");
      pivot(leave, enter);
    }
    throw InternalFault("simplex: iteration limit");
  }

  void set_objective(const Vec& cost) {
    const Eigen::Index obj = m();
    t.row(obj).setZero();
    t.row(obj).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < m(); ++i) {
      const double cb = cost[basis[static_cast<std::size_t>(i)]];
      if (cb != 0.0) t.row(obj) -= cb * t.row(i);
    }
  }
};

}  // namespace

LpSolution solve_lp(const Mat& A, const Vec& b, const Vec& c) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) throw DimensionError("solve_lp: shape mismatch");

  std::vector<Eigen::Index> art_rows;
  for (Eigen::Index i = 0; i < m; ++i)
    if (b[i] < 0) art_rows.push_back(i);
  const auto k = static_cast<Eigen::Index>(art_rows.size());
  const Eigen::Index N = n + m + k;

  // Columns: x (n), slacks (m), artificials (k), rhs.
  Mat full = Mat::Zero(m, N);
  Vec sign = Vec::Ones(m);
  full.leftCols(n) = A;
  full.middleCols(n, m) = Mat::Identity(m, m);
  Vec rhs = b;
  for (Eigen::Index a = 0; a < k; ++a) {
    const Eigen::Index i = art_rows[static_cast<std::size_t>(a)];
    sign[i] = -1.0;
    full.row(i) *= -1.0;
    rhs[i] *= -1.0;
    full(i, n + m + a) = 1.0;
  }

  Tableau tab;
  tab.t = Mat::Zero(m + 1, N + 1);
  tab.t.topLeftCorner(m, N) = full;
  tab.t.col(N).head(m) = rhs;
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) tab.basis[static_cast<std::size_t>(i)] = static_cast<int>(n + i);
  for (Eigen::Index a = 0; a < k; ++a) tab.basis[static_cast<std::size_t>(art_rows[static_cast<std::size_t>(a)])] = static_cast<int>(n + m + a);

  std::vector<bool> allowed(static_cast<std::size_t>(N), true);
  if (k > 0) {
    Vec phase1 = Vec::Zero(N);
    phase1.tail(k).setOnes();
    tab.set_objective(phase1);
    tab.run(allowed);
    if (-tab.t(m, N) > 1e-9) throw InternalFault("simplex: infeasible program");
    // Drive zero-level artificials out of the basis.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] < n + m) continue;
      for (Eigen::Index j = 0; j < n + m; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (Eigen::Index a = 0; a < k; ++a) allowed[static_cast<std::size_t>(n + m + a)] = false;
  }
  Vec cost = Vec::Zero(N);
  cost.head(n) = c;
  tab.set_objective(cost);
  tab.run(allowed);

  LpSolution sol;
  sol.pivots = tab.pivots;
  sol.x = Vec::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int j = tab.basis[static_cast<std::size_t>(i)];
    if (j < n) sol.x[j] = tab.t(i, N);
  }
  sol.objective = c.dot(sol.x);

  // Duals from the final basis: B^T y' = c_B, then undo the row sign flips.
  Mat B(m, m);
  Vec cb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int j = tab.basis[static_cast<std::size_t>(i)];
    B.col(i) = full.col(j);
    cb[i] = cost[j];
  }
  const Vec yp = B.transpose().fullPivLu().solve(cb);
  sol.y = sign.cwiseProduct(yp);
  sol.duality_gap = std::abs(sol.objective - b.dot(sol.y));
  const Vec slackness = A.transpose() * sol.y - c;
  sol.dual_infeasibility = std::max({0.0, slackness.maxCoeff(), sol.y.maxCoeff()});
  return sol;
}

}  // namespace lfa
