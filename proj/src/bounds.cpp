#include "lfa/bounds.hpp"

#include <fmt/format.h>

namespace lfa {

ExtendedScalar ratio_with_conventions(double numerator, double denominator) {
  const bool num_zero = numerator <= kZeroThreshold;
  const bool den_zero = denominator <= kZeroThreshold;
  if (den_zero) return num_zero ? ExtendedScalar::finite(1.0) : ExtendedScalar::infinity();
  return ExtendedScalar::finite(numerator / denominator);
}

double misspecification(const ProblemInstance& instance, NormKind norm) {
  const Vec v = value_function(instance.mrp());
  if (norm == NormKind::L2mu) return project_l2(instance, v).error;
  return project_linf(instance.features(), v).error;
}

ExtendedScalar approx_ratio(const ProblemInstance& instance, const Vec& candidate, NormKind norm) {
  if (candidate.size() != instance.n_states()) throw DimensionError("approx_ratio: candidate length");
  const Vec v = value_function(instance.mrp());
  const double num = norm == NormKind::L2mu ? weighted_norm(candidate - v, instance.mu()) : sup_norm(candidate - v);
  return ratio_with_conventions(num, misspecification(instance, norm));
}

namespace {

Mat a_inverse(const MomentSummary& m) {
  if (!(m.sigma_min_a > 1e-10))
    throw AMatrixSingular(fmt::format("A singular: sigma_min(A) = {:.3g}", m.sigma_min_a));
  return m.a_matrix.partialPivLu().inverse();
}

ExtendedScalar one_plus_sq(ExtendedScalar factor) {
  if (factor.is_infinite()) return factor;
  return ExtendedScalar::finite(std::sqrt(1.0 + factor.value() * factor.value()));
}

ExtendedScalar scaled(ExtendedScalar x, double k) {
  if (x.is_infinite()) return k == 0.0 ? ExtendedScalar::finite(0.0) : x;
  return ExtendedScalar::finite(x.value() * k);
}

Mat i_minus_gp(const ProblemInstance& instance) {
  const int S = instance.n_states();
  return Mat::Identity(S, S) - instance.gamma() * instance.P();
}

}  // namespace

double max_row_sum(const Mat& m) { return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff(); }

Mat lstd_operator(const ProblemInstance& instance) {
  const MomentSummary m = compute_moments(instance);
  return instance.Phi() * a_inverse(m) * instance.Phi().transpose() * instance.mu().weights().asDiagonal();
}

L2Bounds lstd_l2_bounds(const ProblemInstance& instance) {
  const MomentSummary m = compute_moments(instance);
  const Mat H = instance.Phi() * a_inverse(m) * instance.Phi().transpose() * instance.mu().weights().asDiagonal();
  const Mat Pi = projection_matrix_l2(instance);
  const Mat& P = instance.P();
  const Mat M = i_minus_gp(instance);
  const double g = instance.gamma();
  const double w = m.sigma_min_whitened;
  L2Bounds out;
  out.sharp = one_plus_sq(scaled(weighted_operator_norm(H * P, instance.mu()), g));
  out.sharp_alt = one_plus_sq(weighted_operator_norm(H * M, instance.mu()));
  out.split = one_plus_sq(scaled(weighted_operator_norm(Pi * P, instance.mu()), g / w));
  out.split_alt = one_plus_sq(scaled(weighted_operator_norm(Pi * M, instance.mu()), 1.0 / w));
  return out;
}

double decomposition_check_l2(const ProblemInstance& instance) {
  const MomentSummary m = compute_moments(instance);
  const Mat Ainv = a_inverse(m);
  const Mat& Phi = instance.Phi();
  const auto D = instance.mu().weights().asDiagonal();
  const Vec v = value_function(instance.mrp());
  const ProjectionResult ls = project_l2(instance, v);
  const Vec theta_lstd = m.a_matrix.partialPivLu().solve(m.b_vector);
  const Vec v_perp = v - ls.linear_value.realized;
  const Vec lhs = ls.linear_value.realized - Phi * theta_lstd;
  const Vec rhs10 = instance.gamma() * Phi * (Ainv * (Phi.transpose() * (D * (instance.P() * v_perp))));
  const Vec rhs14 = -Phi * (Ainv * (Phi.transpose() * (D * (i_minus_gp(instance) * v_perp))));
  return std::max(sup_norm(lhs - rhs10), sup_norm(lhs - rhs14));
}

LinfBounds lstd_linf_bounds(const ProblemInstance& instance) {
  const MomentSummary m = compute_moments(instance);
  const Mat Ainv = a_inverse(m);
  const Mat& Phi = instance.Phi();
  const auto D = instance.mu().weights().asDiagonal();
  const Mat K = Phi * Ainv * Phi.transpose() * D * i_minus_gp(instance);
  LinfBounds out;
  out.sharp = ExtendedScalar::finite(1.0 + max_row_sum(K));
  out.split = ExtendedScalar::finite(1.0 + (1.0 + instance.gamma()) / m.sigma_min_a);
  const Vec v = value_function(instance.mrp());
  const Vec pinf = project_linf(instance.features(), v).linear_value.realized;
  const Vec theta_lstd = m.a_matrix.partialPivLu().solve(m.b_vector);
  out.decomposition_residual = sup_norm((pinf - Phi * theta_lstd) - K * (pinf - v));
  return out;
}

BoundReport lstd_bound_report(const ProblemInstance& instance) {
  BoundReport rep;
  const LinearValue lstd = lstd_population(instance);
  rep.alpha_l2 = approx_ratio(instance, lstd.realized, NormKind::L2mu);
  rep.alpha_linf = approx_ratio(instance, lstd.realized, NormKind::Linf);
  rep.l2 = lstd_l2_bounds(instance);
  rep.linf = lstd_linf_bounds(instance);
  rep.decomposition_residual = decomposition_check_l2(instance);
  return rep;
}

ExtendedScalar l2_to_linf_translate(const ProblemInstance& instance, ExtendedScalar alpha_mu) {
  if (alpha_mu.value() < 1.0) throw DomainError(fmt::format("alpha_mu = {} < 1", alpha_mu.value()));
  const MomentSummary m = compute_moments(instance);
  double worst = 0.0;
  for (int s = 0; s < instance.n_states(); ++s)
    worst = std::max(worst, (m.sigma_inv_sqrt * instance.features().row(s)).norm());
  if (alpha_mu.is_infinite()) return worst > 0.0 ? alpha_mu : ExtendedScalar::finite(1.0);
  return ExtendedScalar::finite(1.0 + worst * (1.0 + alpha_mu.value()));
}

AlphaOneFlags alpha_one_predicates(const ProblemInstance& instance) {
  const int S = instance.n_states();
  const int d = instance.dim();
  const auto D = instance.mu().weights().asDiagonal();
  const Mat DPhi = D * instance.Phi();
  // Trailing columns of the full Q span ker(Phi^T D).
  const Mat Q = Eigen::HouseholderQR<Mat>(DPhi).householderQ();
  const Mat basis = Q.rightCols(S - d);
  AlphaOneFlags f;
  if (basis.cols() > 0) {
    const Mat img = instance.Phi().transpose() * D * instance.P() * basis;
    f.flag1_residual = img.colwise().norm().maxCoeff();
  }
  f.complement_closed = f.flag1_residual <= 1e-9;
  f.p_norm_finite = weighted_operator_norm(instance.P(), instance.mu()).is_finite();
  return f;
}

}  // namespace lfa
