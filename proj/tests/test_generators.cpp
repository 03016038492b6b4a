#include "helpers.hpp"

#include "lfa/bounds.hpp"
#include "lfa/moments.hpp"

using namespace lfa;
using testutil::vec;

namespace {

double pi_p_norm(const ProblemInstance& inst) {
  return weighted_operator_norm(projection_matrix_l2(inst) * inst.P(), inst.mu()).value();
}

}  // namespace

TEST_CASE("aliased pair parameters") {
  const InstanceFamily a = gen_aliased_pair_l2(std::sqrt(2.0), 0.1);
  CHECK(a.params.at("mu1") == doctest::Approx(0.5));
  CHECK(a.params.at("gamma") == doctest::Approx(0.9));

  const InstanceFamily one = gen_aliased_pair_l2(1.0, 0.1);
  CHECK(one.params.at("mu1") == 0.0);
  CHECK(one.support_degenerate);
  CHECK(pi_p_norm(one.members[0]) == doctest::Approx(1.0));

  const InstanceFamily inf = gen_aliased_pair_l2(std::numeric_limits<double>::infinity(), 0.1);
  CHECK(inf.params.at("mu1") == 1.0);
  CHECK(weighted_operator_norm(projection_matrix_l2(inf.members[0]) * inf.members[0].P(), inf.members[0].mu())
            .is_infinite());

  CHECK_THROWS_AS(gen_aliased_pair_l2(0.9, 0.1), DomainError);
  CHECK_THROWS_AS(gen_aliased_pair_l2(2.0, 0.5), DomainError);
}

TEST_CASE("aliased pair: re-measured parameters and the forced estimator") {
  for (double x : {1.5, 2.0, 4.0})
    for (double y : {0.1, 0.25}) {
      const InstanceFamily f = gen_aliased_pair_l2(x, y);
      const ProblemInstance& m1 = f.members[0];
      CHECK(pi_p_norm(m1) == doctest::Approx(x).epsilon(1e-9));
      CHECK(compute_moments(m1).sigma_min_whitened == doctest::Approx(y).epsilon(1e-9));
      CHECK(populations_equal(population_view(m1), population_view(f.members[1])));

      // Direct arithmetic oracle for the squared error ratio of theta = mu1/(1-g).
      const double g = 1 - y, mu1 = (x * x - 1) / (x * x), mu2 = 1 - mu1;
      const double th = mu1 / (1 - g);
      const double ratio2 = (th * th - 2 * mu1 * th + mu1) / (mu1 * mu2);
      const double alpha = approx_ratio(m1, Vec::Constant(2, th), NormKind::L2mu).value();
      CHECK(alpha * alpha == doctest::Approx(ratio2).epsilon(1e-9));
      CHECK(alpha >= std::sqrt(1 + g * g * (x * x - 1) / (y * y)) - 1e-6);
    }
}

TEST_CASE("eps-discounted instance") {
  const ProblemInstance e = gen_eps_discounted(1e-3, 0.5);
  CHECK_FALSE(pushforward_condition(e).holds);
  CHECK(compute_moments(e).sigma_min_whitened > 0.0);
  CHECK(misspecification(e, NormKind::L2mu) <= 1e-12);
  CHECK_THROWS_AS(gen_eps_discounted(0.0), DomainError);
}

TEST_CASE("fixed five-state instance") {
  const ProblemInstance f = gen_five_state_fixed();
  CHECK(f.mu().support() == std::vector<int>{0, 1, 2});
  CHECK(pushforward_condition(f).holds);
  for (int s = 0; s < 3; ++s) {
    CHECK(std::abs(f.Phi()(s, 0) - five_state::printed_feature_restriction()[s]) <= 1e-4);
    CHECK(std::abs(f.mu().weights()[s] - five_state::printed_mu()[s]) <= 1e-4);
  }
  const Mat occ = occupancy_matrix(f.mrp());
  CHECK((occ.topRows(3) - five_state::printed_occupancy_rows()).cwiseAbs().maxCoeff() <= 1e-3);
  // Members differ only in rewards and share the aliased population's feature law.
  CHECK((gen_five_state_member(0.7).Phi() - f.Phi()).norm() == 0.0);
}

TEST_CASE("A = 0 search") {
  const AZeroSearchResult r = search_a_zero(0, 1000000);
  const MomentSummary m = compute_moments(r.instance);
  CHECK(m.a_matrix.norm() <= 1e-8 * m.sigma.norm());
  for (int s = 0; s < 3; ++s) CHECK(r.instance.mu().weights()[s] > 0.0);
  CHECK(pushforward_condition(r.instance).holds);
  CHECK(r.instance.Phi().rowwise().norm().maxCoeff() <= 1.0 + 1e-12);

  // The printed parameters are accepted.
  CHECK(a_zero_candidate(five_state::printed_transition(), five_state::kLambda1, five_state::kLambda2).has_value());
  // Same-sign coefficients and positive occupancies cannot cancel: mu would be negative.
  CHECK_FALSE(a_zero_candidate(five_state::printed_transition(), 0.5, 0.5).has_value());
  CHECK_THROWS_AS(search_a_zero(0, 0), DomainError);
}

TEST_CASE("perturbed-feature construction at reachable ratios") {
  const Mat P = thm36::transition();
  CHECK((P - thm36::printed_transition()).cwiseAbs().maxCoeff() <= 2e-4);
  CHECK((P.rowwise().sum() - Vec::Ones(5)).cwiseAbs().maxCoeff() <= 1e-15);

  for (double t : {0.3, 0.6}) {
    const ConstructionState st = thm36_state_at(t);
    CHECK(st.converged);
    CHECK(st.kernel_residual <= 1e-9);
    CHECK(st.kernel_rank_ratio <= 1e-9);
    CHECK(st.realization >= 1 - 1e-6);
    if (!std::isnan(st.closed_form_deviation)) CHECK(st.closed_form_deviation <= 1e-8);
    CHECK(st.lambda[0] == doctest::Approx(1.0));
    CHECK(st.lambda[2] == doctest::Approx(st.c));

    const ProblemInstance z0 = thm36_instance(st, 0);
    CHECK(z0.r().norm() == 0.0);
    CHECK(misspecification(z0, NormKind::L2mu) <= 1e-12);
    // Any nonzero theta has infinite ratio on the realizable member.
    CHECK(approx_ratio(z0, z0.Phi() * vec({0.01}).replicate(z0.dim(), 1), NormKind::L2mu).is_infinite());
    for (int z : {-1, 1}) {
      const ProblemInstance m = thm36_instance(st, z);
      CHECK(m.r().cwiseAbs().maxCoeff() <= 1.0);
      CHECK(m.Phi().rowwise().norm().maxCoeff() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("perturbed-feature family hits a reachable target") {
  const Thm36Result r = gen_thm36_family(0.5);
  REQUIRE(r.family.members.size() == 3);
  const MomentSummary m = compute_moments(r.family.members[0]);
  CHECK(pi_p_norm(r.family.members[0]) / m.sigma_min_whitened == doctest::Approx(0.5).epsilon(1e-2));
  CHECK_THROWS_AS(gen_thm36_family(-1.0), DomainError);
}

TEST_CASE("Linf triplet") {
  const InstanceFamily f = gen_linf_triplet(0.9, 0.05);
  const double alpha = (-0.9 + std::sqrt(0.81 + 0.2)) / 0.2;
  CHECK(f.params.at("alpha") == doctest::Approx(alpha).epsilon(1e-12));
  for (const auto& m : f.members) {
    CHECK(compute_moments(m).sigma_min_a == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(m.Phi().rowwise().norm().maxCoeff() <= 1.0 + 1e-12);
  }
  for (int k : {0, 2}) {
    const ProblemInstance& m = f.members[static_cast<std::size_t>(k)];
    const double r2 = m.r()[1];
    CHECK(sup_norm(m.Phi() * vec({r2 / 0.1}) - value_function(m.mrp())) <= alpha + 1e-12);
    CHECK(approx_ratio(m, Vec::Zero(2), NormKind::Linf).value() >= 0.5 + 0.9 / 0.05 - 1e-6);
  }

  const InstanceFamily edge = gen_linf_triplet(0.7, 0.3);
  CHECK(edge.params.at("alpha") == doctest::Approx(1.0));
  const InstanceFamily sing = gen_linf_triplet(0.9, 0.0);
  CHECK(compute_moments(sing.members[0]).sigma_min_a <= 1e-12);
  CHECK_THROWS_AS(gen_linf_triplet(0.5, 0.1), DomainError);
  CHECK_THROWS_AS(gen_linf_triplet(0.9, 0.2), DomainError);
}

TEST_CASE("full-support pair") {
  const InstanceFamily f = gen_full_support_pair(0.5, 0.9);
  CHECK(populations_equal(population_view(f.members[0]), population_view(f.members[1])));
  const double th = 0.9 / 0.5;
  CHECK(approx_ratio(f.members[0], Vec::Constant(2, th), NormKind::Linf).value() == doctest::Approx(3.6).epsilon(1e-9));

  const double g = 0.9, p = 1 - 0.05 * (1 - g);
  const InstanceFamily e = gen_full_support_pair(g, p);
  CHECK(approx_ratio(e.members[0], Vec::Constant(2, p / (1 - g)), NormKind::Linf).value() >= 2 / (1 - g) - 0.1);
  CHECK_THROWS_AS(gen_full_support_pair(0.5, 0.25), DomainError);
}

TEST_CASE("random generators produce valid instances") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const ProblemInstance a = random_instance(111, i, {});
    CHECK(a.mu().full_support());
    CHECK(a.dim() < a.n_states());
    CHECK(compute_moments(a).lambda_min_sigma > 1e-10);
    const ProblemInstance b = random_degenerate_instance(111, i);
    CHECK(compute_moments(b).lambda_min_sigma > 1e-10);
  }
  RandomInstanceOptions o;
  o.aliased = true;
  o.min_states = 3;
  const ProblemInstance al = random_instance(112, 0, o);
  CHECK(bayes_abstraction(al).abstract_states.size() < static_cast<std::size_t>(al.n_states()));
}
