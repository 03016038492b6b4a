#pragma once

#include "lfa/estimators.hpp"
#include "lfa/moments.hpp"

namespace lfa {

inline constexpr double kZeroThreshold = 1e-12;

// 0/0 = 1 and x/0 = inf.
ExtendedScalar ratio_with_conventions(double numerator, double denominator);

double misspecification(const ProblemInstance& instance, NormKind norm);
ExtendedScalar approx_ratio(const ProblemInstance& instance, const Vec& candidate, NormKind norm);

struct L2Bounds {
  ExtendedScalar sharp;        // sqrt(1 + (g ||Phi A^-1 Phi^T D P||)^2)
  ExtendedScalar split;        // sqrt(1 + (g ||Pi P|| / sigma_min(W))^2)
  ExtendedScalar sharp_alt;    // (I - gP) in place of gP
  ExtendedScalar split_alt;
  ExtendedScalar sharp_best() const { return std::min(sharp, sharp_alt); }
  ExtendedScalar split_best() const { return std::min(split, split_alt); }
};

struct LinfBounds {
  ExtendedScalar sharp;  // 1 + ||Phi A^-1 Phi^T D (I - gP)||_inf
  ExtendedScalar split;  // 1 + (1 + g) / sigma_min(A)
  double decomposition_residual = 0.0;
};

struct BoundReport {
  ExtendedScalar alpha_l2;
  ExtendedScalar alpha_linf;
  L2Bounds l2;
  LinfBounds linf;
  double decomposition_residual = 0.0;
};

L2Bounds lstd_l2_bounds(const ProblemInstance& instance);
double decomposition_check_l2(const ProblemInstance& instance);
LinfBounds lstd_linf_bounds(const ProblemInstance& instance);
BoundReport lstd_bound_report(const ProblemInstance& instance);

ExtendedScalar l2_to_linf_translate(const ProblemInstance& instance, ExtendedScalar alpha_mu);

struct AlphaOneFlags {
  bool complement_closed = false;  // flag1
  bool p_norm_finite = false;      // flag2
  double flag1_residual = 0.0;
};

AlphaOneFlags alpha_one_predicates(const ProblemInstance& instance);

// Shared operator pieces.
Mat lstd_operator(const ProblemInstance& instance);  // Phi A^-1 Phi^T D
double max_row_sum(const Mat& m);

}  // namespace lfa
