#include "lfa/moments.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace lfa {

Mat sigma_inverse_sqrt(const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma);
  const Vec& ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-10))
    throw SigmaSingular(fmt::format("Sigma singular: lambda_min = {:.3g}", ev.minCoeff()));
  return eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

double sigma_min(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues().minCoeff();
}

MomentSummary compute_moments(const ProblemInstance& instance) {
  const int S = instance.n_states();
  const Mat& Phi = instance.Phi();
  const auto D = instance.mu().weights().asDiagonal();
  MomentSummary m;
  m.sigma = Phi.transpose() * D * Phi;
  m.sigma = 0.5 * (m.sigma + m.sigma.transpose());
  const Mat M = Mat::Identity(S, S) - instance.gamma() * instance.P();
  m.a_matrix = Phi.transpose() * D * M * Phi;
  m.b_vector = Phi.transpose() * D * instance.r();
  m.lambda_min_sigma = std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat>(m.sigma, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
  m.sigma_inv_sqrt = sigma_inverse_sqrt(m.sigma);
  m.sigma_min_a = sigma_min(m.a_matrix);
  m.sigma_min_whitened = sigma_min(m.sigma_inv_sqrt * m.a_matrix * m.sigma_inv_sqrt);
  return m;
}

ExtendedScalar weighted_operator_norm(const Mat& x, const OfflineDistribution& mu) {
  if (x.rows() != mu.size() || x.cols() != mu.size()) throw DimensionError("weighted_operator_norm: shape mismatch");
  const auto& supp = mu.support();
  const auto comp = mu.complement();
  for (int s : supp)
    for (int t : comp)
      if (std::abs(x(s, t)) > kForbiddenBlockTolerance) return ExtendedScalar::infinity();
  const auto k = static_cast<Eigen::Index>(supp.size());
  Mat block(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double wi = mu.weights()[supp[i]];
      const double wj = mu.weights()[supp[j]];
      block(i, j) = std::sqrt(wi) * x(supp[i], supp[j]) / std::sqrt(wj);
    }
  }
  return ExtendedScalar::finite(Eigen::JacobiSVD<Mat>(block).singularValues()(0));
}

double PushforwardResult::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

PushforwardResult pushforward_condition(const ProblemInstance& instance, double tolerance) {
  PushforwardResult out;
  const Vec& w = instance.mu().weights();
  for (int t : instance.mu().complement()) {
    Vec acc = Vec::Zero(instance.dim());
    for (int s : instance.mu().support()) acc += w[s] * instance.P()(s, t) * instance.features().row(s);
    out.states.push_back(t);
    out.residuals.push_back(acc.norm());
    if (acc.norm() > tolerance) out.holds = false;
  }
  return out;
}

}  // namespace lfa
