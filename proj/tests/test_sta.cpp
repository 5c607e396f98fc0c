#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mgsta/errors.hpp"
#include "mgsta/sta.hpp"
#include "support/oracles.hpp"

using namespace mgsta;

namespace {

StaParams sample_params(std::mt19937_64& rng) {
  StaParams sp;
  sp.alpha = oracles::uniform(rng, 0.2, 3.0);
  sp.beta = oracles::uniform(rng, 0.2, 3.0);
  sp.b = oracles::uniform(rng, 0.5, 4.0);
  sp.p = oracles::uniform(rng, 0.05, 0.5);
  sp.k1 = oracles::uniform(rng, 0.5, 50.0);
  sp.k2 = oracles::uniform(rng, 0.5, 50.0);
  return sp;
}

}  // namespace

TEST_CASE("parameter validation") {
  StaParams sp;
  CHECK_NOTHROW(sp.validate());

  sp.alpha = 0.0;
  CHECK_THROWS_AS(sp.validate_shape(), input_error);
  sp.alpha = 1.0;

  sp.p = 0.0;
  CHECK_THROWS_AS(sp.validate_shape(), input_error);
  sp.p = 0.5;
  CHECK_NOTHROW(sp.validate_shape());
  sp.p = 0.5000001;
  CHECK_THROWS_AS(sp.validate_shape(), input_error);
  sp.p = 0.4;

  sp.b = -1.0;
  CHECK_THROWS_AS(sp.validate_shape(), input_error);
  sp.b = 1.0;

  // gains are ignored by the shape check but enforced by the full one
  sp.k1 = 0.0;
  CHECK_NOTHROW(sp.validate_shape());
  CHECK_THROWS_AS(sp.validate(), input_error);
}

TEST_CASE("phi1 closed form and origin guard") {
  StaParams sp;
  sp.alpha = 2.0;
  sp.beta = 0.5;
  sp.p = 0.3;

  const Vec x{3.0, 4.0};  // ||x|| = 5
  const double gain = 2.0 * std::pow(5.0, -0.3) + 0.5;
  const Vec out = phi1(x, sp);
  CHECK(out[0] == doctest::Approx(gain * 3.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(gain * 4.0).epsilon(1e-15));

  // exact zero at and below the origin guard
  const Vec zero = phi1(Vec{0.0, 0.0}, sp);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  const Vec tiny = phi1(Vec{1e-200, 0.0}, sp);
  CHECK(tiny[0] == 0.0);
  CHECK(phi2(Vec{0.0, 0.0}, sp)[0] == 0.0);

  // quantities that diverge at the origin refuse it instead
  CHECK_THROWS_AS((void)c_scalar(Vec{0.0, 0.0}, sp), input_error);
  CHECK_THROWS_AS((void)jacobian_phi1(Vec{0.0, 0.0}, sp), input_error);
  CHECK_THROWS_AS((void)script_j(Vec{0.0, 0.0}, sp), input_error);
}

TEST_CASE("phi2 equals both c*phi1 and J*phi1") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 300; ++k) {
    const StaParams sp = sample_params(rng);
    const std::size_t n = 2 + k % 3;
    Vec x = oracles::random_unit(rng, n);
    x *= std::pow(10.0, oracles::uniform(rng, -6.0, 2.0));

    const Vec p2 = phi2(x, sp);
    const Vec via_c = c_scalar(x, sp) * phi1(x, sp);
    const Vec via_j = jacobian_phi1(x, sp).mat() * phi1(x, sp);
    CHECK(oracles::rel_err(p2, via_c) <= 1e-12);
    CHECK(oracles::rel_err(p2, via_j) <= 1e-12);
  }
}

TEST_CASE("phi2 expanded power form") {
  // c(x)*phi1(x) multiplies out to
  //   alpha^2 (1-p) ||x||^-2p x + alpha beta (2-p) ||x||^-p x + beta^2 x.
  std::mt19937_64 rng(22);
  for (int k = 0; k < 200; ++k) {
    const StaParams sp = sample_params(rng);
    Vec x = oracles::random_unit(rng, 3);
    x *= std::pow(10.0, oracles::uniform(rng, -4.0, 2.0));
    const double r = norm(x);
    const double coeff = sp.alpha * sp.alpha * (1.0 - sp.p) *
                             std::pow(r, -2.0 * sp.p) +
                         sp.alpha * sp.beta * (2.0 - sp.p) *
                             std::pow(r, -sp.p) +
                         sp.beta * sp.beta;
    CHECK(oracles::rel_err(phi2(x, sp), coeff * x) <= 1e-12);
  }
}

TEST_CASE("jacobian of phi1 matches central differences") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const StaParams sp = sample_params(rng);
    const std::size_t n = 2 + k % 3;
    Vec x = oracles::random_unit(rng, n);
    x *= std::pow(10.0, oracles::uniform(rng, -1.0, 1.0));

    const Mat closed = jacobian_phi1(x, sp).mat();
    const Mat fd = oracles::fd_jacobian(
        [&sp](const Vec& y) { return phi1(y, sp); }, x, 1e-6 * norm(x));
    CHECK(oracles::rel_err(closed, fd) <= 1e-6);
  }
}

TEST_CASE("normalized jacobian spectrum") {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 200; ++k) {
    const StaParams sp = sample_params(rng);
    const std::size_t n = 2 + k % 3;
    Vec x = oracles::random_unit(rng, n);
    const double radius = std::pow(10.0, oracles::uniform(rng, -8.0, 3.0));
    x *= radius;

    const SymMat sj = script_j(x, sp);

    // eigenvalue exactly 1 along x
    const Vec jx = sj.mat() * x;
    CHECK(norm(jx - x) <= 1e-12 * norm(x));

    // remaining eigenvalues all equal the closed-form off-axis value,
    // which lives in [1, 1/(1-p))
    const double off = script_j_offaxis_eigenvalue(radius, sp);
    CHECK(off >= 1.0);
    CHECK(off < 1.0 / (1.0 - sp.p));

    const std::vector<double> ev = eig_sym(sj);
    REQUIRE(ev.size() == n);
    for (double v : ev) {
      CHECK(v >= 1.0 - 1e-10);
      CHECK(v <= 1.0 / (1.0 - sp.p) + 1e-10);
      const bool is_one = std::abs(v - 1.0) <= 1e-10;
      const bool is_off = std::abs(v - off) <= 1e-10 * std::max(1.0, off);
      CHECK((is_one || is_off));
    }
  }
}

TEST_CASE("off-axis eigenvalue approaches its supremum at the origin") {
  StaParams sp;
  sp.alpha = 1.0;
  sp.beta = 1.0;
  sp.p = 0.4;
  const double sup = 1.0 / (1.0 - sp.p);
  CHECK(script_j_offaxis_eigenvalue(1e-12, sp) ==
        doctest::Approx(sup).epsilon(1e-4));
  // monotone decreasing in the radius
  double prev = script_j_offaxis_eigenvalue(1e-12, sp);
  for (double r = 1e-9; r <= 1e3; r *= 1e3) {
    const double cur = script_j_offaxis_eigenvalue(r, sp);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("control law output") {
  StaParams sp;
  sp.alpha = 1.0;
  sp.beta = 1.0;
  sp.b = 3.0;
  sp.p = 0.4;
  sp.k1 = 42.0;
  sp.k2 = 13.0;

  const Vec x{0.3, -0.7};
  const ControllerState cs{Vec{1.0, 2.0}};

  SUBCASE("identity nominal input matrix") {
    const ControlOutput out =
        control_and_derivative(x, cs, Mat::identity(2), sp);
    const Vec expect_u = -sp.k1 * phi1(x, sp) + sp.b * cs.v;
    const Vec expect_vdot = -sp.k2 * phi2(x, sp);
    CHECK(oracles::rel_err(out.u, expect_u) <= 1e-15);
    CHECK(oracles::rel_err(out.v_dot, expect_vdot) <= 1e-15);
  }

  SUBCASE("general nominal input matrix is inverted") {
    const Mat g0{{2.0, 1.0}, {0.0, 4.0}};
    const ControlOutput out = control_and_derivative(x, cs, g0, sp);
    const Vec expect_u = -sp.k1 * phi1(x, sp) + sp.b * (invert(g0) * cs.v);
    CHECK(oracles::rel_err(out.u, expect_u) <= 1e-14);
  }

  SUBCASE("singular nominal input matrix is rejected") {
    const Mat g0{{1.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS((void)control_and_derivative(x, cs, g0, sp),
                    singular_matrix_error);
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS((void)control_and_derivative(Vec{1.0, 2.0, 3.0}, cs,
                                                 Mat::identity(2), sp),
                    input_error);
  }
}
