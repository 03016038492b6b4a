#include "lfa/projections.hpp"

#include "lfa/moments.hpp"
#include "lfa/simplex.hpp"

namespace lfa {

LinearValue make_linear_value(const FeatureMap& features, Vec theta) {
  if (theta.size() != features.dim()) throw DimensionError("theta length differs from feature dimension");
  LinearValue lv;
  lv.realized = features.matrix() * theta;
  lv.theta = std::move(theta);
  return lv;
}

const char* to_string(NormKind k) { return k == NormKind::L2mu ? "l2mu" : "linf"; }

namespace {

Mat sigma_of(const ProblemInstance& instance) {
  const Mat& Phi = instance.Phi();
  const Mat sigma = Phi.transpose() * instance.mu().weights().asDiagonal() * Phi;
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(sigma, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (!(lmin > 1e-10)) throw SigmaSingular("Sigma singular");
  return sigma;
}

}  // namespace

Mat projection_matrix_l2(const ProblemInstance& instance) {
  const Mat& Phi = instance.Phi();
  const Mat sigma = sigma_of(instance);
  return Phi * sigma.ldlt().solve(Phi.transpose() * instance.mu().weights().asDiagonal());
}

ProjectionResult project_l2(const ProblemInstance& instance, const Vec& target) {
  if (target.size() != instance.n_states()) throw DimensionError("project_l2: target length");
  const Mat& Phi = instance.Phi();
  const Mat sigma = sigma_of(instance);
  const Vec rhs = Phi.transpose() * instance.mu().weights().asDiagonal() * target;
  ProjectionResult out;
  out.norm_kind = NormKind::L2mu;
  out.linear_value = make_linear_value(instance.features(), sigma.ldlt().solve(rhs));
  out.error = weighted_norm(out.linear_value.realized - target, instance.mu());
  return out;
}

ProjectionResult project_linf(const FeatureMap& features, const Vec& target) {
  const int S = features.n_states();
  const int d = features.dim();
  if (target.size() != S) throw DimensionError("project_linf: target length");
  ProjectionResult out;
  out.norm_kind = NormKind::Linf;
  if (sup_norm(target) == 0.0) {
    out.linear_value = make_linear_value(features, Vec::Zero(d));
    return out;
  }
  // Variables (theta+, theta-, t); rows  Phi th - t <= v  and  -Phi th - t <= -v.
  const Mat& Phi = features.matrix();
  Mat A(2 * S, 2 * d + 1);
  A << Phi, -Phi, -Vec::Ones(S), -Phi, Phi, -Vec::Ones(S);
  Vec b(2 * S);
  b << target, -target;
  Vec c = Vec::Zero(2 * d + 1);
  c[2 * d] = 1.0;
  const LpSolution lp = solve_lp(A, b, c);
  out.linear_value = make_linear_value(features, lp.x.head(d) - lp.x.segment(d, d));
  out.error = sup_norm(out.linear_value.realized - target);
  out.duality_gap = std::max(lp.duality_gap, lp.dual_infeasibility);
  return out;
}

}  // namespace lfa
