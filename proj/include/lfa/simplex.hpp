#pragma once

#include "lfa/types.hpp"

namespace lfa {

struct LpSolution {
  Vec x;              // primal optimum
  Vec y;              // dual multipliers for A x <= b (all <= 0)
  double objective = 0.0;
  double duality_gap = 0.0;
  double dual_infeasibility = 0.0;
  int pivots = 0;
};

// min c^T x  s.t.  A x <= b, x >= 0. Dense two-phase tableau simplex with
// Bland's rule. Throws InternalFault on infeasible or unbounded programs.
LpSolution solve_lp(const Mat& A, const Vec& b, const Vec& c);

}  // namespace lfa
