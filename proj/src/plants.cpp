#include "mgsta/plants.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mgsta/errors.hpp"

namespace mgsta {

namespace {

Mat rotation(double theta) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  return Mat{{ct, st, 0.0}, {-st, ct, 0.0}, {0.0, 0.0, 1.0}};
}

// Skew pattern coupling theta_dot into the planar channels.
const Mat kSpin{{0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};

Vec tanh_vec(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw input_error(std::string("RobotParams: ") + name +
                      " must be positive and finite");
  }
}

}  // namespace

void RobotParams::validate() const {
  check_positive(m1, "m1");
  check_positive(m2, "m2");
  check_positive(J1, "J1");
  check_positive(J2, "J2");
  check_positive(J3, "J3");
  check_positive(Jm, "Jm");
  check_positive(L, "L");
  check_positive(l1, "l1");
  check_positive(l2, "l2");
  check_positive(r, "r");
  check_positive(ka, "ka");
  check_positive(ra, "ra");
  check_positive(re, "re");
  check_positive(kan, "kan");
  check_positive(ran, "ran");
  check_positive(ren, "ren");
  if (fv_diag.size() != 3 || fd_diag.size() != 3) {
    throw input_error("RobotParams: friction coefficient vectors must have "
                      "dimension 3");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (fv_diag[i] < 0.0 || fd_diag[i] < 0.0 || !std::isfinite(fv_diag[i]) ||
        !std::isfinite(fd_diag[i])) {
      throw input_error("RobotParams: friction coefficients must be >= 0");
    }
  }
  if (Mn.dim() != 3) {
    throw input_error("RobotParams: Mn must be 3x3");
  }
  invert(Mn);  // throws singular_matrix_error when Mn is not invertible
}

void Reference::validate() const {
  if (!q_d || !qd_dot || !qd_ddot) {
    throw input_error("Reference: trajectory callbacks must all be set");
  }
  if (Theta.dim() != 3) {
    throw input_error("Reference: Theta must be 3x3");
  }
  const SymMat t = SymMat::from_checked(Theta);  // throws if unsymmetric
  if (!(eig_sym_extremes(t).first > 0.0)) {
    throw input_error("Reference: Theta must be positive definite");
  }
}

Reference linear_reference(const Vec& rate, const Vec& offset,
                           const Mat& theta) {
  if (rate.size() != 3 || offset.size() != 3) {
    throw input_error("linear_reference: rate and offset must have "
                      "dimension 3");
  }
  Reference ref;
  ref.q_d = [rate, offset](double t) { return offset + t * rate; };
  ref.qd_dot = [rate](double) { return rate; };
  ref.qd_ddot = [](double) { return Vec(3); };
  ref.Theta = theta;
  ref.validate();
  return ref;
}

WheelMap wheel_map(const RobotParams& p) {
  const double inv_r = 1.0 / p.r;
  WheelMap m{};
  const double row0[4] = {1.0, 1.0, 1.0, 1.0};
  const double row1[4] = {1.0, -1.0, 1.0, -1.0};
  const double row2[4] = {p.L, -p.L, -p.L, p.L};
  for (int j = 0; j < 4; ++j) {
    m.e[0][j] = inv_r * row0[j];
    m.e[1][j] = inv_r * row1[j];
    m.e[2][j] = inv_r * row2[j];
  }
  return m;
}

RobotMatrices robot_matrices(const RobotState& state, const RobotParams& p) {
  p.validate();
  if (state.q.size() != 3 || state.qdot.size() != 3) {
    throw input_error("robot_matrices: state must have dimension 3");
  }
  const double shaft = p.J2 + p.Jm * p.re * p.re;
  const double m12 = p.m1 + 4.0 * p.m2 + 4.0 * shaft / (p.r * p.r);
  const double m3 = 4.0 * p.m2 * (p.l1 * p.l1 + p.l2 * p.l2) + p.J1 +
                    4.0 * p.J3 +
                    4.0 * p.L * p.L * shaft / (p.r * p.r);
  RobotMatrices out{Mat::diag(Vec{m12, m12, m3}),
                    rotation(state.q[2]),
                    (4.0 / (p.r * p.r)) * shaft * std::tanh(state.qdot[2]) *
                        kSpin,
                    Vec(3),
                    Vec(3),
                    wheel_map(p)};
  for (std::size_t i = 0; i < 3; ++i) {
    out.fv[i] = p.fv_diag[i] * state.qdot[i];
    out.fd[i] = p.fd_diag[i] * std::tanh(state.qdot[i]);
  }
  return out;
}

Vec wheel_voltages(const Vec& u, const RobotParams& p) {
  if (u.size() != 3) {
    throw input_error("wheel_voltages: u must have dimension 3");
  }
  const WheelMap m = wheel_map(p);
  // E E^T is diagonal for this geometry: diag{4, 4, 4 L^2} / r^2.
  const double r2 = p.r * p.r;
  const Vec y{u[0] * r2 / 4.0, u[1] * r2 / 4.0,
              u[2] * r2 / (4.0 * p.L * p.L)};
  Vec nu(4);
  for (int j = 0; j < 4; ++j) {
    nu[j] = m.e[0][j] * y[0] + m.e[1][j] * y[1] + m.e[2][j] * y[2];
  }
  return nu;
}

Vec robot_accel(const RobotState& state, const Vec& u, const Vec& w,
                const RobotParams& p) {
  if (u.size() != 3 || w.size() != 3) {
    throw input_error("robot_accel: u and w must have dimension 3");
  }
  const RobotMatrices m = robot_matrices(state, p);
  const double kappa = p.ka * p.re / p.ra;
  const Vec rhs = kappa * (m.R.transpose() * u) - m.C * state.qdot - m.fv -
                  m.fd + w;
  return invert(m.M) * rhs;
}

Vec sliding_state(const RobotState& state, const Reference& ref, double t) {
  return ref.Theta * (state.q - ref.q_d(t)) + (state.qdot - ref.qd_dot(t));
}

Vec robot_ctx(const RobotState& state, const Reference& ref, double t) {
  const Vec qt = state.q - ref.q_d(t);
  Vec ctx(6);
  for (std::size_t i = 0; i < 3; ++i) {
    ctx[i] = qt[i];
    ctx[3 + i] = state.qdot[i];
  }
  return ctx;
}

RobotPlant robot_uncertain_plant(const RobotParams& p, const Reference& ref,
                                 const StaParams& sp) {
  p.validate();
  ref.validate();
  sp.validate_shape();
  if (sp.beta != 1.0) {
    throw input_error(
        "robot_uncertain_plant: the decomposition identity f1 = "
        "Delta1*phi1(s) requires beta == 1");
  }
  // The derivative bookkeeping of f2 assumes a constant reference rate.
  {
    const Vec v0 = ref.qd_dot(0.0);
    for (double probe : {0.73, 4.1}) {
      const Vec vp = ref.qd_dot(probe);
      if (norm(vp - v0) > 1e-12 * std::max(1.0, norm(v0))) {
        throw input_error(
            "robot_uncertain_plant: the decomposition requires a constant "
            "reference rate qd_dot");
      }
    }
    if (norm(ref.qd_ddot(0.0)) > 1e-12) {
      throw input_error(
          "robot_uncertain_plant: the decomposition requires qd_ddot == 0");
    }
  }

  // Constant pieces of the model.
  const RobotMatrices base = robot_matrices(RobotState{}, p);
  const Mat M = base.M;
  const Mat Minv = invert(M);
  const Mat Mn_inv = invert(p.Mn);
  const double kappa = p.ka * p.re / p.ra;
  const double kappa_n = p.kan * p.ren / p.ran;
  const double shaft_gain = 4.0 * (p.J2 + p.Jm * p.re * p.re) / (p.r * p.r);
  const Mat identity = Mat::identity(3);
  // DeltaG = (true gain / nominal gain) * M^-1 * Mn - I; the rotation
  // cancels, so the input-matrix uncertainty is constant.
  const Mat delta_g = (kappa / kappa_n) * (Minv * p.Mn) - identity;
  const Mat P = invert(identity + delta_g);
  const Mat fv_mat = Mat::diag(p.fv_diag);
  const Mat fd_mat = Mat::diag(p.fd_diag);
  const Mat theta = ref.Theta;
  const Mat theta2 = theta * theta;
  const Vec e3{0.0, 0.0, 1.0};

  struct FullEval {
    PlantEval e;
    Vec w1;
    Vec residual;
    Vec f_true;
  };

  auto full = [=](double t, const Vec& ctx) -> FullEval {
    if (ctx.size() != 6) {
      throw input_error("robot plant: context must have dimension 6");
    }
    Vec qt(3), qdot(3);
    for (std::size_t i = 0; i < 3; ++i) {
      qt[i] = ctx[i];
      qdot[i] = ctx[3 + i];
    }
    const Vec qd = ref.q_d(t);
    const double th = qt[2] + qd[2];
    if (!(std::abs(th) < std::numbers::pi / 2.0)) {
      throw input_error(
          "robot plant: |theta| >= pi/2 leaves the input-matrix "
          "positivity domain (theta = " +
          std::to_string(th) + ")");
    }
    const double thdot = qdot[2];
    const Vec qd_dot = ref.qd_dot(t);
    const Vec qd_ddot = ref.qd_ddot(t);

    const Mat C = shaft_gain * std::tanh(thdot) * kSpin;
    const Mat minv_cfv = Minv * (C + fv_mat);
    const Mat delta1 = theta - minv_cfv;
    const Vec s = theta * qt + (qdot - qd_dot);

    const Vec f2 = minv_cfv * (theta * qt) - theta2 * qt -
                   minv_cfv * qd_dot - Minv * (fd_mat * tanh_vec(qdot)) -
                   qd_ddot;

    // Raw s_dot coefficient of d/dt[(I+DeltaG)^-1 f2]: the Coriolis term
    // depends on theta_dot and the dry friction on qdot, both of which
    // differentiate into accelerations.
    const double sech2_th = 1.0 - std::tanh(thdot) * std::tanh(thdot);
    const Vec b_col = Minv * (kSpin * (theta * qt - qd_dot));
    Vec sech2(3);
    for (std::size_t i = 0; i < 3; ++i) {
      const double tv = std::tanh(qdot[i]);
      sech2[i] = 1.0 - tv * tv;
    }
    const Mat d3_raw = shaft_gain * sech2_th * outer(b_col, e3) -
                       Minv * (fd_mat * Mat::diag(sech2));

    const double radius = norm(s);
    Mat delta2(3);
    if (radius >= kOriginGuard) {
      const double scale =
          c_scalar(s, sp) * (sp.alpha * std::pow(radius, -sp.p) + sp.beta);
      delta2 = (-1.0 / scale) * (P * ((delta1 + d3_raw) * theta));
    }

    FullEval out{PlantEval{kappa_n * (Mn_inv * rotation(th).transpose()),
                           delta_g,
                           delta1,
                           delta2,
                           P * d3_raw,
                           f2,
                           s},
                 Vec(3),
                 P * ((delta1 + d3_raw) * (theta2 * qt)),
                 theta * (qdot - qd_dot) - qd_ddot +
                     Minv * (-(C * qdot) - fv_mat * qdot -
                             fd_mat * tanh_vec(qdot))};
    if (radius >= kOriginGuard) {
      out.w1 = (sp.alpha * std::pow(radius, -sp.p)) * (delta1 * s);
    }
    return out;
  };

  RobotPlant rp;
  rp.plant.n = 3;
  rp.plant.ctx_dim = 6;
  rp.plant.ctx_names = {"qt_x",   "qt_y",   "qt_theta",
                        "qdot_x", "qdot_y", "qdot_theta"};
  rp.plant.at = [full](double t, const Vec& ctx) { return full(t, ctx).e; };
  rp.plant.ctx_for_state = [ref](double t, const Vec& x) {
    if (x.size() != 3) {
      throw input_error("robot plant: controlled state must have dimension 3");
    }
    const Vec qd_dot = ref.qd_dot(t);
    Vec ctx(6);
    for (std::size_t i = 0; i < 3; ++i) {
      ctx[3 + i] = qd_dot[i] + x[i];  // q_tilde = 0, so s = qdot - qd_dot
    }
    return ctx;
  };
  rp.decomposition_disturbance = [full](double t, const Vec& ctx) {
    return full(t, ctx).w1;
  };
  rp.decomposition_residual = [full](double t, const Vec& ctx) {
    return full(t, ctx).residual;
  };
  rp.f_true = [full](double t, const Vec& ctx) { return full(t, ctx).f_true; };
  return rp;
}

void AcademicParams::validate() const {
  if (!(g_bar >= 0.0) || !std::isfinite(g_bar)) {
    throw input_error("AcademicParams: g_bar must be >= 0 and finite");
  }
  if (!std::isfinite(omega) || !std::isfinite(phase)) {
    throw input_error("AcademicParams: omega and phase must be finite");
  }
}

UncertainPlant academic_plant(const AcademicParams& p) {
  p.validate();
  UncertainPlant plant;
  plant.n = 2;
  plant.ctx_dim = 2;
  plant.ctx_names = {"x1", "x2"};
  plant.at = [p](double t, const Vec& ctx) {
    if (ctx.size() != 2) {
      throw input_error("academic plant: context must have dimension 2");
    }
    const double raw = p.g_bar * std::sin(p.omega * t + p.phase);
    const double g = std::clamp(raw, -p.g_bar, p.g_bar);
    PlantEval e;
    e.G0 = Mat::identity(2);
    e.DeltaG = Mat{{0.0, g}, {g, 0.0}};
    e.Delta1 = Mat(2);
    e.Delta2 = Mat(2);
    e.Delta3 = Mat(2);
    e.f2 = Vec(2);
    e.x = ctx;
    return e;
  };
  plant.ctx_for_state = [](double, const Vec& x) {
    if (x.size() != 2) {
      throw input_error("academic plant: state must have dimension 2");
    }
    return x;
  };
  return plant;
}

}  // namespace mgsta
