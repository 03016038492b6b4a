#include "lfa/generators.hpp"

#include "lfa/moments.hpp"
#include "lfa/rng.hpp"

#include <fmt/format.h>

#include <cmath>

namespace lfa {

namespace thm36 {

Mat printed_transition() {
  Mat P(5, 5);
  P << 0.384931, 0, 0, 0.393873, 0.221196,
       0.0864944, 0.784211, 0, 0.0827968, 0.046498,
       0.575606, 0.35247, 0, 0.0460586, 0.0258661,
       0.346009, 0.227495, 0.00896672, 0.267374, 0.150155,
       0.492524, 0.0488124, 0.364725, 0.0601558, 0.033783;
  return P;
}

Mat printed_occupancy() {
  Mat d(5, 5);
  d << 3.9985, 2.16139, 0.421258, 2.18933, 1.22951,
       2.21064, 4.98011, 0.308174, 1.60162, 0.899458,
       2.96132, 2.86469, 1.34819, 1.80957, 1.01624,
       2.81682, 2.67477, 0.392056, 2.99562, 1.12073,
       3.08799, 2.33295, 0.684865, 1.85336, 2.04083;
  return d;
}

Mat transition() {
  Mat P = printed_transition();
  for (int s = 0; s < 5; ++s) P.row(s) /= P.row(s).sum();
  // The printed columns 4 and 5 are proportional only to ~1e-6.
  const double zeta = P.col(3).sum() / P.col(4).sum();
  for (int s = 0; s < 5; ++s) {
    const double tail = P(s, 3) + P(s, 4);
    P(s, 3) = tail * zeta / (1.0 + zeta);
    P(s, 4) = tail / (1.0 + zeta);
  }
  return P;
}

Mat features(const ConstructionState& st) {
  const Mat occ = occupancy_matrix(Mrp::create(transition(), Vec::Zero(5), kGamma));
  const Vec phi = st.lambda[0] * occ.col(3) + st.lambda[1] * occ.col(4) + st.lambda[2] * st.psi;
  return st.eta * phi;
}

}  // namespace thm36

namespace {

struct Context {
  Mat P;
  Mat occ;
  Mat i_minus_gp;
  Vec mu;
};

Context make_context(double mu1) {
  Context ctx;
  ctx.P = thm36::transition();
  ctx.occ = occupancy_matrix(Mrp::create(ctx.P, Vec::Zero(5), thm36::kGamma));
  ctx.i_minus_gp = Mat::Identity(5, 5) - thm36::kGamma * ctx.P;
  ctx.mu = Vec::Zero(5);
  ctx.mu << mu1, (1.0 - mu1) / 2.0, (1.0 - mu1) / 2.0, 0.0, 0.0;
  return ctx;
}

Mat m_matrix(const Context& ctx, const Vec& psi) {
  Mat X(5, 3);
  X << ctx.occ.col(3), ctx.occ.col(4), psi;
  Mat M(2, 3);
  M.row(0) = (ctx.P.col(3).cwiseProduct(ctx.mu)).transpose() * X;
  M.row(1) = (ctx.P.col(4).cwiseProduct(ctx.mu)).transpose() * X;
  return M;
}

// Kernel vector of M normalised to lambda1 = 1, lambda3 = c.
Vec kernel_lambda(const Mat& M, double c, double* rank_ratio) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  *rank_ratio = sv[0] > 0.0 ? sv[1] / sv[0] : 0.0;
  const Mat K = svd.matrixV().rightCols(2);
  Mat sys(2, 2);
  sys << K.row(0), K.row(2);
  const Vec coef = sys.fullPivLu().solve(Eigen::Vector2d(1.0, c));
  return K * coef;
}

// Closed-form lambda2 from the rank-one factorisation M_bar = a b^T, a1 = 1.
double closed_form_lambda2(const Mat& M, double c) {
  const Vec a = Eigen::Vector2d(1.0, M(1, 0) / M(0, 0));
  const Vec b = M.row(0).head(2).transpose();
  const Vec m3 = M.col(2);
  const double sgn = a.dot(m3) >= 0.0 ? 1.0 : -1.0;
  return (-c * sgn * m3.norm() / a.norm() - b[0]) / b[1];
}

Mat projection(const Vec& phi, const Vec& mu) {
  const double sigma = phi.dot(mu.cwiseProduct(phi));
  return phi * (mu.cwiseProduct(phi)).transpose() / sigma;
}

Vec canonical_sign(Vec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

struct Step {
  Vec lambda;
  Mat M;
  Mat N;
  Vec next;
  double rank_ratio = 0.0;
};

Step step(const Context& ctx, const Vec& psi, double c) {
  Step st;
  st.M = m_matrix(ctx, psi);
  st.lambda = kernel_lambda(st.M, c, &st.rank_ratio);
  const Vec phi = st.lambda[0] * ctx.occ.col(3) + st.lambda[1] * ctx.occ.col(4) + st.lambda[2] * psi;
  const Mat Pi = projection(phi, ctx.mu);
  Vec sq = ctx.mu.cwiseSqrt();
  Vec inv_sq = Vec::Zero(5);
  for (int s = 0; s < 5; ++s)
    if (ctx.mu[s] > kSupportThreshold) inv_sq[s] = 1.0 / sq[s];
  st.N = sq.asDiagonal() * Pi * ctx.i_minus_gp * inv_sq.asDiagonal();
  Eigen::JacobiSVD<Mat> svd(st.N, Eigen::ComputeFullV);
  // Back to original coordinates, then unit 2-norm.
  Vec x = inv_sq.cwiseProduct(svd.matrixV().col(0));
  st.next = canonical_sign(x / x.norm());
  return st;
}

Vec start_direction(std::uint64_t seed, int k) {
  Vec psi = Vec::Zero(5);
  if (k == 0) {
    psi[0] = 1.0;
    return psi;
  }
  Engine eng = make_stream(seed, static_cast<std::uint64_t>(k));
  std::normal_distribution<double> n(0.0, 1.0);
  for (int s = 0; s < 3; ++s) psi[s] = n(eng);
  return canonical_sign(psi / psi.norm());
}

void certify(ConstructionState& st, const Context& ctx) {
  const ProblemInstance inst = thm36_instance(st, 0);
  const Mat Pi = projection(inst.Phi().col(0), ctx.mu);
  const Mat op = Pi * ctx.i_minus_gp;
  const double achieved = weighted_norm(op * st.psi, inst.mu()) / weighted_norm(st.psi, inst.mu());
  const ExtendedScalar full = weighted_operator_norm(op, inst.mu());
  st.realization = full.is_finite() && full.value() > 0 ? achieved / full.value() : 0.0;
  const MomentSummary m = compute_moments(inst);
  const ExtendedScalar pp = weighted_operator_norm(Pi * ctx.P, inst.mu());
  st.rho = pp.is_infinite() ? std::numeric_limits<double>::infinity() : pp.value() / m.sigma_min_whitened;
  st.kernel_residual = (st.m_matrix * st.lambda).norm();
}

}  // namespace

ProblemInstance thm36_instance(const ConstructionState& st, int z) {
  const Mat Phi = thm36::features(st);
  Vec r = Vec::Zero(5);
  r[3] = z * st.lambda[0] * st.eta;
  r[4] = z * st.lambda[1] * st.eta;
  return ProblemInstance::build(thm36::transition(), deterministic_rewards(r), thm36::kGamma, Phi, st.mu);
}

ConstructionState thm36_state_at(double mu1, double c, std::uint64_t seed) {
  if (!(mu1 > 0.0 && mu1 < 1.0)) throw DomainError(fmt::format("mu1 = {} outside (0, 1)", mu1));
  const Context ctx = make_context(mu1);
  constexpr int kStarts = 16;
  constexpr int kMaxIter = 10000;
  for (int k = 0; k < kStarts; ++k) {
    ConstructionState st;
    st.c = c;
    st.eta = thm36::kEta;
    st.mu = ctx.mu;
    st.psi = start_direction(seed, k);
    Step last;
    for (st.iterations = 1; st.iterations <= kMaxIter; ++st.iterations) {
      last = step(ctx, st.psi, c);
      const double delta = (last.next - st.psi).norm();
      st.psi = last.next;
      if (delta <= 1e-10) {
        st.converged = true;
        break;
      }
    }
    last = step(ctx, st.psi, c);
    st.lambda = last.lambda;
    st.m_matrix = last.M;
    st.n_matrix = last.N;
    st.kernel_rank_ratio = last.rank_ratio;
    st.closed_form_deviation = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(st.m_matrix(0, 1)) > 1e-10)
      st.closed_form_deviation = std::abs(closed_form_lambda2(st.m_matrix, c) - st.lambda[1]);
    try {
      certify(st, ctx);
    } catch (const Error&) {
      continue;
    }
    if (st.realization >= 1.0 - 1e-6) return st;
  }
  throw FixedPointDivergence(fmt::format("no certified fixed point at mu1 = {} from {} starts", mu1, kStarts));
}

Thm36Result gen_thm36_family(double x, std::uint64_t seed) {
  if (!(x > 0.0)) throw DomainError(fmt::format("x = {} must be positive", x));
  constexpr double c = 1.0;
  auto rho_at = [&](double t) -> std::optional<ConstructionState> {
    try {
      return thm36_state_at(t, c, seed);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  // Log-spaced scan of the path, then bisection on the first sign change.
  std::vector<double> grid;
  for (int i = 0; i <= 64; ++i) grid.push_back(thm36::kMu1Min * std::pow(0.5 / thm36::kMu1Min, i / 64.0));
  for (int i = 1; i <= 16; ++i) grid.push_back(0.5 + 0.5 * (1.0 - std::pow(10.0, -8.0 * i / 16.0)));
  std::optional<ConstructionState> prev;
  double t_prev = 0.0;
  double best_rho = 0.0;
  for (double t : grid) {
    auto cur = rho_at(t);
    if (!cur) {
      prev.reset();
      continue;
    }
    best_rho = std::max(best_rho, cur->rho);
    if (prev && (prev->rho - x) * (cur->rho - x) <= 0.0) {
      double lo = t_prev, hi = t;
      ConstructionState lo_st = *prev, hi_st = *cur;
      ConstructionState best = std::abs(lo_st.rho - x) < std::abs(hi_st.rho - x) ? lo_st : hi_st;
      for (int it = 0; it < 200 && std::abs(best.rho - x) > 1e-4 * x; ++it) {
        const double mid = std::sqrt(lo * hi);
        auto m = rho_at(mid);
        if (!m) break;
        if ((lo_st.rho - x) * (m->rho - x) <= 0.0) {
          hi = mid;
          hi_st = *m;
        } else {
          lo = mid;
          lo_st = *m;
        }
        if (std::abs(m->rho - x) < std::abs(best.rho - x)) best = *m;
      }
      if (std::abs(best.rho - x) <= 0.01 * x) {
        Thm36Result res;
        res.state = best;
        for (int z : {-1, 0, 1}) res.family.members.push_back(thm36_instance(best, z));
        res.family.params = {{"x", x}, {"mu1", best.mu[0]}, {"c", c}, {"eta", best.eta}, {"rho", best.rho}};
        res.family.support_degenerate = true;
        return res;
      }
    }
    prev = cur;
    t_prev = t;
  }
  throw BisectionFailure(fmt::format("rho does not bracket x = {} on the mu1 path (largest certified rho {:.4g})", x,
                                     best_rho));
}

}  // namespace lfa
