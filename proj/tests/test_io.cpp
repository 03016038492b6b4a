#include "helpers.hpp"

#include "lfa/io.hpp"
#include "lfa/moments.hpp"
#include "lfa/verify.hpp"

using namespace lfa;

namespace {

const char* kTiny = R"(# two states
states 2
gamma 0.5
P
0 1
0 1
r 1 ber 0.25
features 1
1
0.5
mu 0.5 0.5
)";

}  // namespace

TEST_CASE("round trip of the fixed five-state instance") {
  const ProblemInstance f = gen_five_state_fixed();
  const ProblemInstance g = parse_instance(render_instance(f));
  const MomentSummary a = compute_moments(f), b = compute_moments(g);
  CHECK((a.sigma - b.sigma).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.a_matrix - b.a_matrix).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(g.features().bound() == FeatureBound::SupportOnly);
}

TEST_CASE("render is a fixed point after one parse") {
  std::vector<ProblemInstance> xs{gen_five_state_fixed(), gen_eps_discounted(0.1), parse_instance(kTiny)};
  for (const auto& m : gen_aliased_pair_l2(2.0, 0.25).members) xs.push_back(m);
  for (std::uint64_t i = 0; i < 20; ++i) xs.push_back(random_degenerate_instance(5, i));
  for (const auto& x : xs) {
    const std::string once = render_instance(parse_instance(render_instance(x)));
    CHECK(once == render_instance(parse_instance(once)));
    CHECK(once == render_instance(x));
  }
}

TEST_CASE("parse details") {
  const ProblemInstance t = parse_instance(kTiny);
  CHECK(t.rewards()[1].kind == RewardLaw::Kind::Bernoulli);
  CHECK(t.r()[1] == 0.25);
  CHECK(t.gamma() == 0.5);

  std::string near = kTiny;
  near.replace(near.find("P\n0 1"), 5, "P\n0 0.999");
  CHECK(parse_instance(near).P()(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parse errors") {
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kTiny;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK_THROWS_AS(parse_instance(with("mu 0.5 0.5", "mu -0.5 1.5")), InvariantError);
  CHECK_THROWS_AS(parse_instance(with("mu 0.5 0.5", "mu 0.5 0.5 0")), DimensionError);
  CHECK_THROWS_AS(parse_instance(with("states 2", "states 3")), DimensionError);
  try {
    parse_instance(with("gamma 0.5", "gamma abc"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(parse_instance(with("mu 0.5 0.5\n", "")), ParseError);
  CHECK_THROWS_AS(parse_instance(std::string(kTiny) + "gamma 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_instance(with("r 1 ber", "r 1 bern")), ParseError);
  // Singular Sigma.
  CHECK_THROWS_AS(parse_instance(with("1\n0.5\nmu", "0\n0\nmu")), InvariantError);
}

TEST_CASE("dataset round trip") {
  const Dataset ds = sample_dataset(random_instance(3, 3, {}), 200, 17);
  const Dataset back = parse_dataset(render_dataset(ds));
  REQUIRE(back.n() == ds.n());
  CHECK(back.seed == 17);
  CHECK(back.dim == ds.dim);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    CHECK(back.samples[i].phi == ds.samples[i].phi);
    CHECK(back.samples[i].reward == ds.samples[i].reward);
    CHECK(back.samples[i].phi_next == ds.samples[i].phi_next);
  }
  CHECK(render_dataset(back) == render_dataset(ds));
  CHECK_THROWS_AS(parse_dataset("1 2 3\n"), ParseError);
}

TEST_CASE("report serialization") {
  CHECK(scalar_json(ExtendedScalar::infinity()) == "inf");
  CHECK(scalar_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(parse_params("x=2,y=0.25") == Params{{"x", "2"}, {"y", "0.25"}});
  const Json a = to_json(run_verification("thm32", {}, 0), false);
  const Json b = to_json(run_verification("thm32", {}, 0), false);
  CHECK(a.dump() == b.dump());
  CHECK(a.at("schema") == 1);
  CHECK(a.at("pass") == true);
  CHECK_FALSE(a.contains("wall_time_ms"));
  CHECK_THROWS_AS(run_verification("nope", {}, 0), DomainError);
}
