#include "lfa/generators.hpp"

#include "lfa/moments.hpp"
#include "lfa/rng.hpp"

#include <fmt/format.h>

namespace lfa {

namespace {

Mat two_state_chain() {
  Mat P(2, 2);
  P << 0, 1, 0, 1;
  return P;
}

}  // namespace

InstanceFamily gen_aliased_pair_l2(double x, double y) {
  if (!(x >= 1.0)) throw DomainError(fmt::format("x = {} < 1", x));
  if (!(y > 0.0 && y < 0.5)) throw DomainError(fmt::format("y = {} outside (0, 1/2)", y));
  const double mu1 = std::isinf(x) ? 1.0 : (x * x - 1.0) / (x * x);
  const double gamma = 1.0 - y;
  const Mat P = two_state_chain();
  const Mat Phi = Mat::Ones(2, 1);
  Vec mu(2);
  mu << mu1, 1.0 - mu1;
  InstanceFamily fam;
  fam.members.push_back(ProblemInstance::build(
      P, {RewardLaw::deterministic(1.0), RewardLaw::deterministic(0.0)}, gamma, Phi, mu));
  fam.members.push_back(ProblemInstance::build(
      P, {RewardLaw::bernoulli(mu1), RewardLaw::bernoulli(mu1)}, gamma, Phi, mu));
  fam.params = {{"x", x}, {"y", y}, {"gamma", gamma}, {"mu1", mu1}};
  fam.support_degenerate = !fam.members[0].mu().full_support();
  fam.shared_population = population_view(fam.members[0]);
  return fam;
}

ProblemInstance gen_eps_discounted(double eps, double gamma, double reward) {
  if (!(eps > 0.0)) throw DomainError(fmt::format("eps = {} must be positive", eps));
  Mat Phi(2, 1);
  Phi << gamma, 1.0 + eps;
  Vec mu(2);
  mu << 1.0, 0.0;
  return ProblemInstance::build(two_state_chain(), {RewardLaw::deterministic(0.0), RewardLaw::deterministic(reward)},
                                gamma, Phi, mu, FeatureBound::SupportOnly);
}

namespace five_state {

Mat printed_transition() {
  Mat P(5, 5);
  P << 0.313, 0.2322, 0.2999, 0.0786, 0.0763,
       0.8483, 0.0014, 0.0867, 0.0484, 0.0152,
       0.1144, 0.2852, 0.219, 0.2437, 0.1377,
       0, 0, 0, 1, 0,
       0, 0, 0, 0, 1;
  return P;
}

Mat printed_occupancy_rows() {
  Mat d(3, 5);
  d << 2.22637, 0.675069, 0.814047, 3.65445, 2.63005,
       1.76839, 1.56311, 0.74639, 3.56891, 2.35319,
       0.85084, 0.586281, 1.58849, 4.3413, 2.63309;
  return d;
}

Vec printed_mu() {
  Vec mu(3);
  mu << 0.0840949, 0.660425, 0.25548;
  return mu;
}

Vec printed_feature_restriction() {
  Vec f(3);
  f << 0.313528, 0.104797, -0.0870883;
  return f;
}

}  // namespace five_state

Vec solve_a_zero_mu(const Mat& P, const Mat& features) {
  // Rows: pushforward into states 4 and 5 (d = 1), then normalization.
  Mat M = Mat::Zero(3, 3);
  for (int j = 0; j < 3; ++j) {
    M(0, j) = features(j, 0) * P(j, 3);
    M(1, j) = features(j, 0) * P(j, 4);
    M(2, j) = 1.0;
  }
  Vec rhs(3);
  rhs << 0, 0, 1;
  const Vec sol = M.fullPivLu().solve(rhs);
  Vec mu = Vec::Zero(5);
  mu.head(3) = sol;
  return mu;
}

namespace {

ProblemInstance five_state_with_rewards(const Vec& r) {
  const Mat P = five_state::printed_transition();
  const Mat occ = occupancy_matrix(Mrp::create(P, Vec::Zero(5), five_state::kGamma));
  const Mat Phi = five_state::kLambda1 * occ.col(3) + five_state::kLambda2 * occ.col(4);
  const Vec mu = solve_a_zero_mu(Mrp::create(P, Vec::Zero(5), five_state::kGamma).transition(), Phi);
  return ProblemInstance::build(P, deterministic_rewards(r), five_state::kGamma, Phi, mu, FeatureBound::SupportOnly);
}

}  // namespace

ProblemInstance gen_five_state_fixed() { return five_state_with_rewards(Vec::Zero(5)); }

ProblemInstance gen_five_state_member(double theta) {
  Vec r = Vec::Zero(5);
  r[3] = theta * five_state::kLambda1;
  r[4] = theta * five_state::kLambda2;
  return five_state_with_rewards(r);
}

std::optional<ProblemInstance> a_zero_candidate(const Mat& P, double lambda1, double lambda2, double tol_rel) {
  const double gamma = five_state::kGamma;
  Mrp mrp = Mrp::create(P, Vec::Zero(5), gamma);
  const Mat occ = occupancy_matrix(mrp);
  Mat Phi = lambda1 * occ.col(3) + lambda2 * occ.col(4);
  const double scale = Phi.rowwise().norm().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  Phi /= scale;
  const Vec mu = solve_a_zero_mu(mrp.transition(), Phi);
  if (!mu.allFinite()) return std::nullopt;
  for (int j = 0; j < 3; ++j)
    if (!(mu[j] > kSupportThreshold)) return std::nullopt;
  try {
    auto inst = ProblemInstance::build(mrp.transition(), deterministic_rewards(Vec::Zero(5)), gamma, Phi, mu);
    const MomentSummary m = compute_moments(inst);
    if (m.a_matrix.norm() > tol_rel * m.sigma.norm()) return std::nullopt;
    if (!pushforward_condition(inst).holds) return std::nullopt;
    return inst;
  } catch (const Error&) {
    return std::nullopt;
  }
}

AZeroSearchResult search_a_zero(std::uint64_t seed, long max_trials, double tol_rel) {
  if (max_trials < 1) throw DomainError("max_trials must be >= 1");
  for (long trial = 0; trial < max_trials; ++trial) {
    Engine eng = make_stream(seed, static_cast<std::uint64_t>(trial));
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Mat P = Mat::Zero(5, 5);
    for (int s = 0; s < 3; ++s) {
      for (int t = 0; t < 5; ++t) P(s, t) = expo(eng);
      P.row(s) /= P.row(s).sum();
    }
    P(3, 3) = 1.0;
    P(4, 4) = 1.0;
    const double l1 = unif(eng);
    const double l2 = unif(eng);
    if (auto inst = a_zero_candidate(P, l1, l2, tol_rel)) return {std::move(*inst), trial, l1, l2};
  }
  throw SearchExhausted(fmt::format("no A = 0 instance within {} trials", max_trials));
}

InstanceFamily gen_linf_triplet(double gamma, double y) {
  if (!(gamma >= 0.7 && gamma < 1.0)) throw DomainError(fmt::format("gamma = {} outside [0.7, 1)", gamma));
  if (!(y >= 0.0 && y <= 1.0 - gamma + 1e-15)) throw DomainError(fmt::format("y = {} outside [0, 1 - gamma]", y));
  const double alpha = (-gamma + std::sqrt(gamma * gamma + 4.0 * y)) / (2.0 * (1.0 - gamma));
  Mat Phi(2, 1);
  Phi << (1.0 - gamma) * alpha + gamma, 1.0;
  Vec mu(2);
  mu << 1.0, 0.0;
  InstanceFamily fam;
  for (double r2 : {-1.0, 0.0, 1.0}) {
    fam.members.push_back(ProblemInstance::build(
        two_state_chain(), {RewardLaw::deterministic(0.0), RewardLaw::deterministic(r2)}, gamma, Phi, mu));
  }
  fam.params = {{"gamma", gamma}, {"y", y}, {"alpha", alpha}};
  fam.support_degenerate = true;
  return fam;
}

InstanceFamily gen_full_support_pair(double gamma, double p) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError(fmt::format("gamma = {} outside [0, 1)", gamma));
  if (!(p > 0.0 && p < 1.0 && p > (1.0 - gamma) / 2.0))
    throw DomainError(fmt::format("p = {} violates 0 < p < 1 and p > (1 - gamma)/2", p));
  Vec mu(2);
  mu << p, 1.0 - p;
  InstanceFamily fam;
  fam.members.push_back(ProblemInstance::build(
      two_state_chain(), {RewardLaw::deterministic(1.0), RewardLaw::deterministic(0.0)}, gamma, Mat::Ones(2, 1), mu));
  fam.members.push_back(ProblemInstance::build(Mat::Ones(1, 1), {RewardLaw::bernoulli(p)}, gamma, Mat::Ones(1, 1),
                                               Vec::Ones(1)));
  fam.params = {{"gamma", gamma}, {"p", p}};
  fam.shared_population = population_view(fam.members[0]);
  return fam;
}

namespace {

Mat random_stochastic(Engine& eng, int rows, int cols, double sparsity) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, cols - 1);
  Mat P = Mat::Zero(rows, cols);
  for (int s = 0; s < rows; ++s) {
    for (int t = 0; t < cols; ++t)
      if (u(eng) >= sparsity) P(s, t) = expo(eng);
    if (P.row(s).sum() == 0.0) P(s, pick(eng)) = 1.0;
    P.row(s) /= P.row(s).sum();
  }
  return P;
}

Mat random_features(Engine& eng, int S, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  Mat Phi(S, d);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < d; ++j) Phi(s, j) = n(eng);
  return Phi * (u(eng) / Phi.rowwise().norm().maxCoeff());
}

std::vector<RewardLaw> random_rewards(Engine& eng, int S, bool allow_bernoulli) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<RewardLaw> out;
  for (int s = 0; s < S; ++s) {
    if (allow_bernoulli && u01(eng) < 0.25) {
      out.push_back(RewardLaw::bernoulli(u01(eng)));
    } else {
      out.push_back(RewardLaw::deterministic(u(eng)));
    }
  }
  return out;
}

}  // namespace

ProblemInstance random_instance(std::uint64_t seed, std::uint64_t index, const RandomInstanceOptions& opt) {
  Engine eng = make_stream(seed, index);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int S = std::uniform_int_distribution<int>(opt.min_states, opt.max_states)(eng);
    const int d_cap = std::min(opt.max_dim, opt.proper ? S - 1 : S);
    const int d = std::uniform_int_distribution<int>(std::min(opt.min_dim, d_cap), d_cap)(eng);
    const double gamma = opt.gamma_min + (opt.gamma_max - opt.gamma_min) * u01(eng);
    const Mat P = random_stochastic(eng, S, S, 0.3);
    Mat Phi = random_features(eng, S, d);
    if (opt.aliased && S > d) {
      // Copy a random earlier row onto some states.
      const int distinct = std::uniform_int_distribution<int>(d, S - 1)(eng);
      for (int s = distinct; s < S; ++s) Phi.row(s) = Phi.row(std::uniform_int_distribution<int>(0, distinct - 1)(eng));
    }
    Vec mu(S);
    std::exponential_distribution<double> expo(1.0);
    for (int s = 0; s < S; ++s) mu[s] = 0.05 + expo(eng);
    if (!opt.full_support) {
      const int k = std::uniform_int_distribution<int>(std::max(1, d), S)(eng);
      for (int s = k; s < S; ++s) mu[s] = 0.0;
    }
    mu /= mu.sum();
    try {
      return ProblemInstance::build(P, random_rewards(eng, S, true), gamma, Phi, mu);
    } catch (const InvariantError&) {
      continue;
    }
  }
  throw InternalFault("random_instance: no valid draw");
}

ProblemInstance random_degenerate_instance(std::uint64_t seed, std::uint64_t index) {
  Engine eng = make_stream(seed, index);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const int mode = static_cast<int>(index % 3);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int S = std::uniform_int_distribution<int>(3, 8)(eng);
    const int k = std::uniform_int_distribution<int>(2, S - 1)(eng);  // support = first k states
    const int d = std::uniform_int_distribution<int>(1, std::min(3, k - (mode == 2 ? 1 : 0)))(eng);
    const double gamma = 0.99 * u01(eng);
    Mat P = random_stochastic(eng, S, S, 0.3);
    Mat Phi = random_features(eng, S, d);
    Vec mu = Vec::Zero(S);
    for (int s = 0; s < k; ++s) mu[s] = 0.05 + expo(eng);
    if (mode == 1) {
      // Unsupported states unreachable from the support.
      P.topLeftCorner(k, k) = random_stochastic(eng, k, k, 0.3);
      P.topRightCorner(k, S - k).setZero();
    } else if (mode == 2) {
      // States 0 and 1 cancel: phi_1 = -phi_0, equal mass, equal rows.
      // Others in the support do not reach the complement.
      Phi.row(1) = -Phi.row(0);
      mu[1] = mu[0];
      if (k > 2) {
        P.block(2, 0, k - 2, k) = random_stochastic(eng, k - 2, k, 0.3);
        P.block(2, k, k - 2, S - k).setZero();
      }
      P.row(1) = P.row(0);
    }
    mu /= mu.sum();
    try {
      return ProblemInstance::build(P, random_rewards(eng, S, false), gamma, Phi, mu);
    } catch (const InvariantError&) {
      continue;
    }
  }
  throw InternalFault("random_degenerate_instance: no valid draw");
}

}  // namespace lfa
