#include "helpers.hpp"

#include "lfa/bounds.hpp"
#include "lfa/moments.hpp"

using namespace lfa;
using testutil::vec;

namespace {

ExtendedScalar lstd_alpha(const ProblemInstance& inst, NormKind k) {
  return approx_ratio(inst, lstd_population(inst).realized, k);
}

ProblemInstance closed_block_instance(double gamma) {
  Mat P = Mat::Zero(4, 4);
  P.topLeftCorner(2, 2).setConstant(0.5);
  P.bottomRightCorner(2, 2).setConstant(0.5);
  Mat Phi = Mat::Zero(4, 2);
  Phi(0, 0) = Phi(1, 0) = Phi(2, 1) = Phi(3, 1) = 1.0;
  return testutil::simple(P, vec({1, 0, 0.3, 0.9}), gamma, Phi, Vec::Constant(4, 0.25));
}

}  // namespace

TEST_CASE("ratio conventions") {
  CHECK(ratio_with_conventions(0.0, 0.0).value() == 1.0);
  CHECK(ratio_with_conventions(1e-13, 1e-14).value() == 1.0);
  CHECK(ratio_with_conventions(0.5, 0.0).is_infinite());
  CHECK(ratio_with_conventions(3.0, 2.0).value() == 1.5);
}

TEST_CASE("approximation ratio of the projection is one") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const ProblemInstance inst = random_instance(101, i, {});
    const Vec v = value_function(inst.mrp());
    CHECK(approx_ratio(inst, project_l2(inst, v).linear_value.realized, NormKind::L2mu).value() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(approx_ratio(inst, project_linf(inst.features(), v).linear_value.realized, NormKind::Linf).value() ==
          doctest::Approx(1.0).epsilon(1e-7));
  }
  // Realizable target, wrong candidate.
  const ProblemInstance zero = testutil::simple(testutil::chain2(), vec({0, 0}), 0.5, Mat::Ones(2, 1), vec({0.5, 0.5}));
  CHECK(approx_ratio(zero, vec({0.1, 0.1}), NormKind::L2mu).is_infinite());
  CHECK(approx_ratio(zero, vec({0.0, 0.0}), NormKind::Linf).value() == 1.0);
}

TEST_CASE("gamma = 0 bounds collapse to one") {
  RandomInstanceOptions o;
  o.gamma_min = o.gamma_max = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const ProblemInstance inst = random_instance(102, i, o);
    const L2Bounds b = lstd_l2_bounds(inst);
    CHECK(b.sharp.value() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b.split.value() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lstd_alpha(inst, NormKind::L2mu).value() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("L2 bound ordering on random instances") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const ProblemInstance inst = random_instance(103, i, {});
    if (compute_moments(inst).sigma_min_a <= 1e-6) continue;
    const BoundReport r = lstd_bound_report(inst);
    CHECK(r.alpha_l2.value() <= r.l2.sharp.value() * (1 + 1e-8) + 1e-8);
    CHECK(r.l2.sharp.value() <= r.l2.split.value() * (1 + 1e-8) + 1e-8);
    CHECK(r.l2.sharp_alt.value() <= r.l2.split_alt.value() * (1 + 1e-8) + 1e-8);
    CHECK(r.alpha_l2.value() <= r.l2.sharp_alt.value() * (1 + 1e-8) + 1e-8);
    CHECK(r.alpha_linf.value() <= r.linf.sharp.value() * (1 + 1e-8) + 1e-8);
    CHECK(r.linf.sharp.value() <= r.linf.split.value() * (1 + 1e-8) + 1e-8);
  }
}

TEST_CASE("split bound closed forms") {
  // Aliased pair: ||Pi P|| = x and sigma_min(W) = y.
  const ProblemInstance m = gen_aliased_pair_l2(2.0, 0.25).members[0];
  CHECK(lstd_l2_bounds(m).split.value() == doctest::Approx(std::sqrt(1 + std::pow(0.75 * 2 / 0.25, 2))).epsilon(1e-9));
  // Pushforward failure makes the split bound infinite.
  CHECK(lstd_l2_bounds(gen_eps_discounted(0.1)).split.is_infinite());
  // One feature: Linf split = 1 + (1+g)/|A|.
  const ProblemInstance e = gen_eps_discounted(0.1, 0.8);
  CHECK(lstd_linf_bounds(e).split.value() == doctest::Approx(1 + 1.8 / (0.64 * 0.1)).epsilon(1e-10));
}

TEST_CASE("decomposition identity against an independent solve") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const ProblemInstance inst = random_instance(104, i, {});
    const MomentSummary mo = compute_moments(inst);
    if (mo.sigma_min_a <= 1e-6) continue;
    const int S = inst.n_states();
    const Vec sq = inst.mu().weights().cwiseSqrt();
    const Vec v = value_function(inst.mrp());
    const Vec th_ls = (sq.asDiagonal() * inst.Phi()).colPivHouseholderQr().solve(sq.asDiagonal() * v);
    const Vec th_td = mo.a_matrix.fullPivLu().solve(mo.b_vector);
    const Mat D = inst.mu().diag();
    const Vec vperp = v - inst.Phi() * th_ls;
    const Mat Ainv = mo.a_matrix.fullPivLu().inverse();
    const Vec lhs = inst.Phi() * (th_ls - th_td);
    const Vec rhs = inst.gamma() * inst.Phi() * Ainv * inst.Phi().transpose() * D * inst.P() * vperp;
    const Vec rhs_alt =
        -inst.Phi() * Ainv * inst.Phi().transpose() * D * (Mat::Identity(S, S) - inst.gamma() * inst.P()) * vperp;
    const double tol = 1e-8 * (1 + sup_norm(v));
    CHECK(sup_norm(lhs - rhs) <= tol);
    CHECK(sup_norm(lhs - rhs_alt) <= tol);
    CHECK(decomposition_check_l2(inst) <= tol);
    CHECK(lstd_linf_bounds(inst).decomposition_residual <= tol);
  }
}

TEST_CASE("L2 to Linf translation") {
  for (int S : {2, 3, 5}) {
    Mat P = Mat::Constant(S, S, 1.0 / S);
    const ProblemInstance tab =
        testutil::simple(P, Vec::Zero(S), 0.5, Mat::Identity(S, S), Vec::Constant(S, 1.0 / S));
    CHECK(l2_to_linf_translate(tab, ExtendedScalar::finite(1.0)).value() ==
          doctest::Approx(1 + 2 * std::sqrt(double(S))));
    CHECK_THROWS_AS(l2_to_linf_translate(tab, ExtendedScalar::finite(0.0)), DomainError);
  }
}

TEST_CASE("alpha-one predicates") {
  const ProblemInstance block = closed_block_instance(0.9);
  const AlphaOneFlags f = alpha_one_predicates(block);
  CHECK(f.complement_closed);
  CHECK(f.p_norm_finite);
  CHECK(lstd_alpha(block, NormKind::L2mu).value() == doctest::Approx(1.0).epsilon(1e-8));

  const AlphaOneFlags full = alpha_one_predicates(random_instance(105, 0, {}));
  CHECK(full.p_norm_finite);

  const AlphaOneFlags lem = alpha_one_predicates(gen_eps_discounted(0.1));
  CHECK_FALSE(lem.p_norm_finite);

  // Whenever the closure predicate holds, LSTD attains alpha = 1.
  for (std::uint64_t i = 0; i < 100; ++i) {
    const ProblemInstance inst = random_instance(106, i, {});
    if (compute_moments(inst).sigma_min_a <= 1e-6) continue;
    if (alpha_one_predicates(inst).complement_closed)
      CHECK(lstd_alpha(inst, NormKind::L2mu).value() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("tabular full support recovers v") {
  RandomInstanceOptions o;
  o.proper = false;
  o.min_states = o.max_states = 3;
  o.min_dim = o.max_dim = 3;
  const ProblemInstance inst = random_instance(107, 0, o);
  CHECK(sup_norm(lstd_population(inst).realized - value_function(inst.mrp())) <= 1e-9);
}
