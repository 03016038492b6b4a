#pragma once

#include "lfa/mrp.hpp"

namespace lfa {

struct MomentSummary {
  Mat sigma;
  Mat a_matrix;
  Vec b_vector;
  double sigma_min_a = 0.0;
  double sigma_min_whitened = 0.0;
  double lambda_min_sigma = 0.0;
  Mat sigma_inv_sqrt;
};

// Throws SigmaSingular when lambda_min(Sigma) <= 1e-10.
MomentSummary compute_moments(const ProblemInstance& instance);

Mat sigma_inverse_sqrt(const Mat& sigma);
double sigma_min(const Mat& m);

// Block entries above this make the L2(mu) operator norm infinite.
inline constexpr double kForbiddenBlockTolerance = 1e-10;

ExtendedScalar weighted_operator_norm(const Mat& x, const OfflineDistribution& mu);

struct PushforwardResult {
  bool holds = true;
  std::vector<int> states;        // unsupported states checked
  std::vector<double> residuals;  // ||sum_s mu(s) phi(s) P(s'|s)|| per state
  double max_residual() const;
};

PushforwardResult pushforward_condition(const ProblemInstance& instance, double tolerance = 1e-9);

}  // namespace lfa
