#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mgsta/errors.hpp"
#include "mgsta/gain_design.hpp"
#include "support/oracles.hpp"

using namespace mgsta;

namespace {

/// Minimal valid constants: unit input matrix bounds and nothing else.
BoundConstants plain_constants() {
  BoundConstants c{};
  c.g_m = 1.0;
  c.g_M = 1.0;
  c.gamma1 = 1.0;
  c.gamma2 = 1.0;
  return c;
}

DesignInputs plain_inputs() {
  DesignInputs in;
  in.constants = plain_constants();
  in.sp.alpha = 1.0;
  in.sp.beta = 1.0;
  in.sp.b = 1.0;
  in.sp.p = 0.5;
  return in;
}

/// Randomized constants in plausible ranges, with the input-uncertainty
/// terms shrunk until the existence test holds by a comfortable margin.
BoundConstants random_feasible(std::mt19937_64& rng) {
  BoundConstants c{};
  c.g_m = oracles::uniform(rng, 0.05, 1.5);
  c.g_M = c.g_m * oracles::uniform(rng, 1.0, 5.0);
  c.delta1 = oracles::uniform(rng, 0.0, 4.0);
  c.delta2 = oracles::uniform(rng, 0.0, 4.0);
  c.delta3 = oracles::uniform(rng, 0.0, 2.0);
  c.gamma1 = oracles::uniform(rng, 0.2, 2.0);
  c.gamma2 = c.gamma1 * oracles::uniform(rng, 1.0, 2.0);
  c.gamma3 = oracles::uniform(rng, 0.5, 20.0);
  c.mu1 = oracles::uniform(rng, 0.0, 4.0);
  c.mu2 = oracles::uniform(rng, 0.0, 3.0);
  c.mu3 = oracles::uniform(rng, 0.0, 1.0);
  c.mu4 = oracles::uniform(rng, 0.0, 2.0);
  c.theta1 = oracles::uniform(rng, 0.0, 2.0);
  c.theta2 = oracles::uniform(rng, 0.0, 8.0);
  c.theta3 = oracles::uniform(rng, 0.0, 25.0);
  c.theta4 = oracles::uniform(rng, 0.0, 1.0);
  c.theta5 = oracles::uniform(rng, 0.0, 8.0);
  c.theta6 = oracles::uniform(rng, 0.0, 1.0);
  c.theta7 = oracles::uniform(rng, 0.0, 8.0);
  c.theta8 = oracles::uniform(rng, 0.0, 1.0);
  c.theta9 = oracles::uniform(rng, 0.0, 1.0);
  c.theta10 = oracles::uniform(rng, 0.0, 1.0);
  c.theta11 = oracles::uniform(rng, 0.0, 8.0);
  c.theta12 = oracles::uniform(rng, 0.0, 25.0);

  // choose gamma4, gamma5 so that a target share of the budget gamma1*g_m
  // remains as existence margin
  const double budget = c.gamma1 * c.g_m;
  const double share = oracles::uniform(rng, 0.2, 0.8);
  c.gamma4 = oracles::uniform(rng, 0.0, 0.5) * (1.0 - share) * budget;
  const double room = (1.0 - share) * budget - c.gamma4;  // for 2*sqrt(g3*g5)
  c.gamma5 = 0.25 * room * room / c.gamma3 * oracles::uniform(rng, 0.1, 0.9);
  return c;
}

}  // namespace

TEST_CASE("existence test arithmetic") {
  BoundConstants c = plain_constants();
  c.gamma3 = 4.0;
  c.gamma4 = 0.25;
  c.gamma5 = 0.01;
  // margin = 1*1 - 0.25 - 2*sqrt(0.04) = 0.35
  const FeasibilityResult f = check_feasibility(c);
  CHECK(f.feasible);
  CHECK(f.margin == doctest::Approx(0.35).epsilon(1e-14));

  c.gamma4 = 0.7;
  c.gamma5 = 0.0625;  // 2*sqrt(4*0.0625) = 1 > remaining budget
  const FeasibilityResult g = check_feasibility(c);
  CHECK_FALSE(g.feasible);
  CHECK(g.margin == doctest::Approx(1.0 - 0.7 - 1.0).epsilon(1e-14));

  // the boundary case margin == 0 is not feasible (strict inequality)
  c.gamma4 = 0.0;
  c.gamma3 = 1.0;
  c.gamma5 = 0.25;
  CHECK_FALSE(check_feasibility(c).feasible);
}

TEST_CASE("design functions collapse to closed forms on plain constants") {
  const DesignInputs in = plain_inputs();

  const double p1 = 3.0, p2 = 0.5;
  const DesignFunctions f = eval_xi_gamma(p1, p2, in);
  CHECK(f.Xi1 == 0.0);
  CHECK(f.Xi2 == 0.0);
  CHECK(f.Xi3 == 0.0);
  CHECK(f.Gamma0 == 0.0);
  CHECK(f.Gamma1 == doctest::Approx(1.0).epsilon(1e-15));  // (0 + 0 - 1)^2
  CHECK(f.Gamma2 == 0.0);

  const Alphas a = eval_alphas(p1, p2, in);
  CHECK(a.alpha2 == 0.0);
  CHECK(a.alpha1 == doctest::Approx(-p1).epsilon(1e-15));
  CHECK(a.alpha0 == doctest::Approx(2.0 * p1 / p2).epsilon(1e-15));
}

TEST_CASE("third design function sums its weighted constants") {
  DesignInputs in = plain_inputs();
  in.constants.gamma3 = 18.4838;
  in.sp.b = 3.0;
  const DesignFunctions f = eval_xi_gamma(1.0, 0.7, in);
  CHECK(f.Xi3 == doctest::Approx(18.4838 / 3.0).epsilon(1e-15));

  in.constants.theta1 = 2.0;
  in.constants.theta2 = 5.0;
  const DesignFunctions g = eval_xi_gamma(1.0, 0.7, in);
  CHECK(g.Xi3 ==
        doctest::Approx((18.4838 + 2.0 * 0.7 + 5.0 * 0.49) / 3.0)
            .epsilon(1e-15));
}

TEST_CASE("alphas reject an inadmissible p2") {
  DesignInputs in = plain_inputs();
  in.constants.mu4 = 2.0;  // gamma1 - p2*mu4 <= 0 for p2 >= 0.5
  CHECK_THROWS_AS((void)eval_alphas(1.0, 0.6, in), input_error);
  CHECK_NOTHROW((void)eval_alphas(1.0, 0.4, in));
}

TEST_CASE("synthesis on plain constants picks a valid flat-quadratic gain") {
  const DesignInputs in = plain_inputs();
  const DesignResult r = design_gains(in);

  // alpha2 = 0 here, so the admissible k1 interval is (2/p2, k1_cap)
  CHECK(r.alphas.alpha2 == 0.0);
  CHECK(r.k1_lo == doctest::Approx(2.0 / r.p2).epsilon(1e-12));
  CHECK(r.k1_hi == in.search.k1_cap);
  CHECK(r.k1 > r.k1_lo);
  CHECK(r.k1 < r.k1_hi);
  CHECK(r.p1 * r.p2 > 1.0);
  CHECK(r.k2 == doctest::Approx(in.sp.b * r.p1 / r.p2).epsilon(1e-15));
  CHECK(r.gamma1_tilde == doctest::Approx(1.0).epsilon(1e-15));

  const VerifyReport rep = verify_gain_selection(r, in);
  CHECK(rep.all_pass);
  for (const CheckLine& line : rep.checks) {
    CHECK_MESSAGE(line.pass, line.name);
    CHECK_MESSAGE(line.slack > 0.0, line.name);
  }
}

TEST_CASE("random feasible constants always close the loop") {
  std::mt19937_64 rng(314159);
  int designed = 0;
  for (int k = 0; k < 40; ++k) {
    DesignInputs in = plain_inputs();
    in.constants = random_feasible(rng);
    REQUIRE(check_feasibility(in.constants).feasible);

    const DesignResult r = design_gains(in);
    ++designed;

    // the quadratic is strictly negative at the midpoint gain and
    // (approximately) zero at interval ends when alpha2 > 0
    const Alphas& a = r.alphas;
    const double at_k1 =
        a.alpha2 * r.k1 * r.k1 + a.alpha1 * r.k1 + a.alpha0;
    CHECK(at_k1 < 0.0);
    if (a.alpha2 > 0.0) {
      const double scale = std::abs(a.alpha0) + std::abs(a.alpha1) * r.k1_lo;
      const double at_lo =
          a.alpha2 * r.k1_lo * r.k1_lo + a.alpha1 * r.k1_lo + a.alpha0;
      const double at_hi =
          a.alpha2 * r.k1_hi * r.k1_hi + a.alpha1 * r.k1_hi + a.alpha0;
      CHECK(std::abs(at_lo) <= 1e-8 * std::max(1.0, scale));
      CHECK(std::abs(at_hi) <=
            1e-8 * std::max(1.0, std::abs(a.alpha2) * r.k1_hi * r.k1_hi));
    }

    const VerifyReport rep = verify_gain_selection(r, in);
    CHECK(rep.all_pass);
    for (const CheckLine& line : rep.checks) {
      CHECK_MESSAGE(line.slack > 0.0, line.name, " on instance ", k);
    }
  }
  CHECK(designed == 40);
}

TEST_CASE("input uncertainty bounded away from the limit is always feasible") {
  // with gamma4 = gamma5 = 0 the existence margin equals gamma1*g_m > 0
  std::mt19937_64 rng(2718);
  for (int k = 0; k < 20; ++k) {
    BoundConstants c = random_feasible(rng);
    c.gamma4 = 0.0;
    c.gamma5 = 0.0;
    const FeasibilityResult f = check_feasibility(c);
    CHECK(f.feasible);
    CHECK(f.margin == doctest::Approx(c.gamma1 * c.g_m).epsilon(1e-14));
  }
}

TEST_CASE("design is deterministic") {
  std::mt19937_64 rng(55);
  DesignInputs in = plain_inputs();
  in.constants = random_feasible(rng);
  const DesignResult r1 = design_gains(in);
  const DesignResult r2 = design_gains(in);
  CHECK(r1.p1 == r2.p1);
  CHECK(r1.p2 == r2.p2);
  CHECK(r1.k1 == r2.k1);
  CHECK(r1.k2 == r2.k2);
  CHECK(r1.k1_lo == r2.k1_lo);
  CHECK(r1.k1_hi == r2.k1_hi);
}

TEST_CASE("infeasible constants are rejected with the margin attached") {
  std::mt19937_64 rng(77);
  BoundConstants c = random_feasible(rng);
  c.gamma5 *= 1e6;  // blow the existence budget
  REQUIRE_FALSE(check_feasibility(c).feasible);

  DesignInputs in = plain_inputs();
  in.constants = c;
  bool thrown = false;
  try {
    (void)design_gains(in);
  } catch (const infeasible_error& e) {
    thrown = true;
    CHECK(e.margin() < 0.0);
    CHECK(e.margin() ==
          doctest::Approx(check_feasibility(c).margin).epsilon(1e-12));
  }
  CHECK(thrown);
}

TEST_CASE("a grid that cannot reach p1*p2 > 1 exhausts the search") {
  DesignInputs in = plain_inputs();
  in.search.p1_min = 1e-3;
  in.search.p1_max = 2e-3;
  in.search.p1_steps = 2;
  // p2 starts at the fallback 10 and decreases: p1*p2 <= 0.02 always
  CHECK_THROWS_AS((void)design_gains(in), search_exhausted);
  try {
    (void)design_gains(in);
  } catch (const search_exhausted& e) {
    CHECK(std::string(e.what()).find("p1*p2") != std::string::npos);
  }
}

TEST_CASE("search options are validated") {
  DesignInputs in = plain_inputs();
  in.search.p1_steps = 1;
  CHECK_THROWS_AS((void)design_gains(in), input_error);
  in.search = SearchOptions{};
  in.search.k1_cap = 0.0;
  CHECK_THROWS_AS((void)design_gains(in), input_error);
  in.search = SearchOptions{};
  in.search.p1_min = -1.0;
  CHECK_THROWS_AS((void)design_gains(in), input_error);
}

TEST_CASE("externally chosen gains can be audited") {
  std::mt19937_64 rng(4242);
  DesignInputs in = plain_inputs();
  in.constants = random_feasible(rng);
  const DesignResult r = design_gains(in);

  // the designed pair must audit clean
  const VerifyReport good = assess_gains(r.k1, r.k2, in);
  CHECK(good.all_pass);

  // a proportional gain far above the admissible interval must not
  const VerifyReport bad = assess_gains(r.k1 * 1e6, r.k2, in);
  CHECK_FALSE(bad.all_pass);

  CHECK_THROWS_AS((void)assess_gains(-1.0, 1.0, in), input_error);
}
