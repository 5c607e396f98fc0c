#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "mgsta/errors.hpp"
#include "mgsta/lyapunov.hpp"
#include "mgsta/plant.hpp"
#include "mgsta/plants.hpp"
#include "mgsta/sta.hpp"
#include "support/oracles.hpp"

using namespace mgsta;

namespace {

StaParams nominal_params() {
  StaParams sp;
  sp.alpha = 1.0;
  sp.beta = 1.0;
  sp.b = 1.0;
  sp.p = 0.5;
  sp.k1 = 5.0;
  sp.k2 = 10.0;
  return sp;
}

Mat assemble(const QBlocks& q) {
  const std::size_t n = q.Q11.dim();
  Mat full(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      full(i, j) = q.Q11(i, j);
      full(i, n + j) = q.Q21(j, i);  // Q12 = Q21^T
      full(n + i, j) = q.Q21(i, j);
      full(n + i, n + j) = q.Q22(i, j);
    }
  return full;
}

}  // namespace

TEST_CASE("certificate parameter validation") {
  CHECK_NOTHROW((LyapCert{20.0, 2.0}.validate()));
  CHECK_THROWS_AS((LyapCert{1.0, 1.0}.validate()), input_error);
  CHECK_THROWS_AS((LyapCert{-4.0, -4.0}.validate()), input_error);
  try {
    LyapCert{2.0, 0.5}.validate();
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("p1*p2 > 1") != std::string::npos);
  }
}

TEST_CASE("quadratic value closed form") {
  const LyapCert cert{3.0, 2.0};
  const Vec zeta{1.0, -1.0, 2.0, 0.5};  // z1 = (1,-1), z2 = (2, 0.5)
  // V = 1/2 (3*2 - 2*(2 - 0.5) + 2*4.25) = 1/2 (6 - 3 + 8.5)
  CHECK(lyap_value(zeta, cert) == doctest::Approx(5.75).epsilon(1e-15));
  CHECK_THROWS_AS((void)lyap_value(Vec{1.0, 2.0, 3.0}, cert), input_error);
}

TEST_CASE("certificate coordinates on an exactly known plant") {
  const UncertainPlant plant = identity_plant(2);
  const StaParams sp = nominal_params();
  const Vec x{0.4, -0.3};
  const Vec v{1.0, 2.0};
  // f2 = 0, DeltaG = 0: zeta = (phi1(x), v)
  const Vec zeta = zeta_coords(0.0, x, v, plant, sp);
  const Vec p1x = phi1(x, sp);
  REQUIRE(zeta.size() == 4);
  CHECK(zeta[0] == doctest::Approx(p1x[0]).epsilon(1e-15));
  CHECK(zeta[1] == doctest::Approx(p1x[1]).epsilon(1e-15));
  CHECK(zeta[2] == doctest::Approx(v[0]).epsilon(1e-15));
  CHECK(zeta[3] == doctest::Approx(v[1]).epsilon(1e-15));
}

TEST_CASE("Q blocks of the no-uncertainty loop have closed forms") {
  // With G = G0 = I and no perturbations: K1~ = k1 I, K2~ = k2 I, A = 0, so
  //   Q11 = (p1 k1 - k2) I,  Q21 = -k1 script_j + p2 k2 I - b p1 I,
  //   Q22 = b script_j.
  const UncertainPlant plant = identity_plant(3);
  const StaParams sp = nominal_params();
  const LyapCert cert{20.0, 2.0};

  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    Vec x = oracles::random_unit(rng, 3);
    x *= std::pow(10.0, oracles::uniform(rng, -4.0, 2.0));

    const QBlocks q = build_q_blocks(0.0, x, plant, sp, cert);
    const Mat sj = script_j(x, sp).mat();

    const Mat q11_expect = (cert.p1 * sp.k1 - sp.k2) * Mat::identity(3);
    const Mat q21_expect = -sp.k1 * sj +
                           (cert.p2 * sp.k2 - sp.b * cert.p1) *
                               Mat::identity(3);
    const Mat q22_expect = sp.b * sj;

    CHECK(oracles::rel_err(q.Q11.mat(), q11_expect) <= 1e-12);
    CHECK(oracles::rel_err(q.Q21, q21_expect) <= 1e-12);
    CHECK(oracles::rel_err(q.Q22.mat(), q22_expect) <= 1e-12);

    // with k1=5, k2=10, p1=20, p2=2, b=1 this is Q11 = 90I, Q21 = -5*script_j
    CHECK(q.Q11(0, 0) == doctest::Approx(90.0).epsilon(1e-14));
    CHECK(oracles::rel_err(q.Q21, -5.0 * sj) <= 1e-12);
    CHECK(q.c == doctest::Approx(c_scalar(x, sp)).epsilon(1e-15));
  }

  CHECK_THROWS_AS(
      (void)build_q_blocks(0.0, Vec{0.0, 0.0, 0.0}, plant, sp, cert),
      input_error);
}

TEST_CASE("nominal certificate is positive definite everywhere") {
  const UncertainPlant plant = identity_plant(2);
  const StaParams sp = nominal_params();
  const LyapCert cert{20.0, 2.0};

  std::mt19937_64 rng(6);
  for (int k = 0; k < 1000; ++k) {
    Vec x = oracles::random_unit(rng, 2);
    x *= std::pow(10.0, oracles::uniform(rng, -8.0, 3.0));
    const QBlocks q = build_q_blocks(0.0, x, plant, sp, cert);
    CHECK(q_positive_definite(q, default_pd_margin(q)));
    CHECK(assembled_q_lambda_min(q) > 0.0);
  }
}

TEST_CASE("Schur test agrees with the assembled spectrum and Sylvester") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = 2 + k % 2;
    // random blocks; shift Q22 to keep its smallest eigenvalue positive
    // (the Schur test requires Q22 > 0, as does the closed-loop theory)
    QBlocks q{oracles::random_sym(rng, n, 3.0),
              oracles::random_mat(rng, n, 2.0),
              oracles::random_sym(rng, n, 1.0), 1.0};
    Mat q22 = q.Q22.mat();
    const double shift =
        -eig_sym_extremes(q.Q22).first + oracles::uniform(rng, 0.05, 2.0);
    for (std::size_t i = 0; i < n; ++i) q22(i, i) += shift;
    q.Q22 = SymMat::from_checked(q22);

    const double lmin = assembled_q_lambda_min(q);
    const double scale = std::max({max_abs(q.Q11.mat()), max_abs(q.Q21),
                                   max_abs(q.Q22.mat()), 1.0});
    if (std::abs(lmin) <= 1e-7 * scale) continue;  // too close to the fence
    ++checked;
    const bool schur = q_positive_definite(q, 0.0);
    CHECK_MESSAGE(schur == (lmin > 0.0), "lambda_min = ", lmin);
    CHECK(schur == oracles::sylvester_pd(SymMat::from_checked(assemble(q))));
  }
  CHECK(checked > 1500);  // the guard band must not eat the test
}

TEST_CASE("default margin tracks the block magnitude") {
  const QBlocks small{sym(Mat::identity(2)), Mat(2), sym(Mat::identity(2)),
                      1.0};
  CHECK(default_pd_margin(small) == doctest::Approx(1e-12).epsilon(1e-12));

  const QBlocks big{sym(1e10 * Mat::identity(2)), Mat(2),
                    sym(Mat::identity(2)), 1.0};
  CHECK(default_pd_margin(big) == doctest::Approx(1e-2).epsilon(1e-12));
}

TEST_CASE("integrator-branch block keeps its guaranteed floor") {
  // Q22 = b Sym{script_j (I + DeltaG)} for the coupled two-channel plant
  // (A = 0 there), so lambda_min(Q22) >= b * gamma1 / 2 with gamma1 the
  // pointwise pencil minimum.
  AcademicParams ap;
  ap.g_bar = 0.2;
  const UncertainPlant plant = academic_plant(ap);
  StaParams sp = nominal_params();
  const LyapCert cert{20.0, 2.0};

  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const double t = oracles::uniform(rng, 0.0, 0.63);
    Vec x = oracles::random_unit(rng, 2);
    x *= std::pow(10.0, oracles::uniform(rng, -3.0, 1.0));

    const QBlocks q = build_q_blocks(t, x, plant, sp, cert);
    const PlantEval e = plant.at(t, x);
    const Mat pencil = script_j(e.x, sp).mat() *
                       (Mat::identity(2) + e.DeltaG);
    const double gamma1_pt = eig_sym_extremes(sym(2.0 * pencil)).first;
    CHECK(eig_sym_extremes(q.Q22).first >=
          sp.b * gamma1_pt / 2.0 - 1e-12);
  }
}

TEST_CASE("trajectory monitor on a clean decreasing run") {
  // hand-built trace: the no-uncertainty loop x_dot = u integrated finely
  const UncertainPlant plant = identity_plant(2);
  StaParams sp = nominal_params();
  const LyapCert cert{20.0, 2.0};

  const double dt = 1e-4;
  std::vector<MonitorSample> rows;
  Vec x{1.0, -0.5};
  Vec v(2);
  for (int i = 0; i <= 4000; ++i) {
    rows.push_back(MonitorSample{i * dt, x, x, v});
    const ControllerState cs{v};
    const ControlOutput out =
        control_and_derivative(x, cs, Mat::identity(2), sp);
    x += dt * out.u;
    v += dt * out.v_dot;
  }

  const MonitorReport rep =
      monitor_trajectory(rows, plant, sp, cert, std::nullopt);
  CHECK(rep.samples == rows.size());
  CHECK(rep.pre_convergence == rows.size());
  CHECK(rep.vdot_checked == rows.size() - 2);
  CHECK(rep.vdot_negative_fraction >= 0.99);
  CHECK(rep.q_pd_everywhere);
  CHECK(rep.min_q_lambda_min > 0.0);
  CHECK(rep.max_v >= lyap_value(zeta_coords(0.0, rows[0].x, rows[0].v,
                                            plant, sp),
                                cert));

  // with a convergence time, later rows stop counting as pre-convergence
  const MonitorReport half =
      monitor_trajectory(rows, plant, sp, cert, rows[2000].t);
  CHECK(half.pre_convergence == 2000);
  CHECK(half.vdot_checked == 1999);
  CHECK(half.max_post_conv_residual >= 0.0);

  // non-uniform grids are rejected
  std::vector<MonitorSample> skewed = rows;
  skewed[10].t += 0.3 * dt;
  CHECK_THROWS_AS(
      (void)monitor_trajectory(skewed, plant, sp, cert, std::nullopt),
      input_error);
}
