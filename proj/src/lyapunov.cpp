#include "mgsta/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgsta/errors.hpp"

namespace mgsta {

void LyapCert::validate() const {
  if (!std::isfinite(p1) || !std::isfinite(p2) || !(p1 > 0.0) || !(p2 > 0.0)) {
    throw input_error("LyapCert: p1 and p2 must be positive and finite");
  }
  if (!(p1 * p2 > 1.0)) {
    throw input_error(
        "LyapCert: p1*p2 > 1 is required for a positive definite quadratic "
        "form");
  }
}

Vec zeta_coords(double t, const Vec& ctx, const Vec& v,
                const UncertainPlant& plant, const StaParams& sp) {
  const PlantEval e = plant.at(t, ctx);
  const std::size_t n = plant.n;
  if (v.size() != n || e.x.size() != n || e.f2.size() != n) {
    throw input_error("zeta_coords: dimension mismatch");
  }
  const Mat T = Mat::identity(n) + e.DeltaG;
  const Vec z = v + (1.0 / sp.b) * (invert(T) * e.f2);
  const Vec z1 = phi1(e.x, sp);
  Vec zeta(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    zeta[i] = z1[i];
    zeta[n + i] = z[i];
  }
  return zeta;
}

double lyap_value(const Vec& zeta, const LyapCert& cert) {
  cert.validate();
  if (zeta.size() % 2 != 0 || zeta.size() == 0) {
    throw input_error("lyap_value: zeta must have even positive dimension");
  }
  const std::size_t n = zeta.size() / 2;
  double n1 = 0.0, n2 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    n1 += zeta[i] * zeta[i];
    n2 += zeta[n + i] * zeta[n + i];
    cross += zeta[i] * zeta[n + i];
  }
  return 0.5 * (cert.p1 * n1 - 2.0 * cross + cert.p2 * n2);
}

QBlocks build_q_blocks(double t, const Vec& ctx, const UncertainPlant& plant,
                       const StaParams& sp, const LyapCert& cert) {
  cert.validate();
  sp.validate();
  const PlantEval e = plant.at(t, ctx);
  const std::size_t n = plant.n;
  if (norm(e.x) < kOriginGuard) {
    throw input_error(
        "build_q_blocks: Q is undefined at the origin of the controlled "
        "state");
  }

  const Mat identity = Mat::identity(n);
  const Mat T = identity + e.DeltaG;
  const Mat G = T * e.G0;
  const Mat g_inv = invert(G);

  const Mat J = script_j(e.x, sp).mat();
  const double c = c_scalar(e.x, sp);
  const Mat A = (1.0 / c) * e.Delta3;

  const Mat K1t = sp.k1 * identity - g_inv * e.Delta1;
  const Mat K2t = sp.k2 * identity - e.Delta2;
  const Mat GK1 = G * K1t;
  const Mat common = K2t + A * GK1;

  const SymMat q11 = sym(cert.p1 * GK1 - common);
  const Mat q21 = -(J * GK1) + cert.p2 * common +
                  sp.b * (T.transpose() * (A.transpose() - cert.p1 * identity));
  const SymMat q22 = sym(sp.b * (J * T - cert.p2 * (A * T)));

  return QBlocks{q11, q21, q22, c};
}

bool q_positive_definite(const QBlocks& q, double margin) {
  const double q22_min = eig_sym_extremes(q.Q22).first;
  if (!(q22_min > std::max(margin, 0.0))) return false;

  const Mat q22_inv = invert(q.Q22.mat());
  const Mat schur =
      q.Q11.mat() - q.Q21.transpose() * (q22_inv * q.Q21);
  const double schur_min = eig_sym_extremes(sym(schur)).first;
  return schur_min > margin;
}

double default_pd_margin(const QBlocks& q) {
  const double scale = std::max(
      {max_abs(q.Q11.mat()), max_abs(q.Q21), max_abs(q.Q22.mat()), 1.0});
  return 1e-12 * scale;
}

double assembled_q_lambda_min(const QBlocks& q) {
  const std::size_t n = q.Q11.dim();
  Mat full(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      full(i, j) = q.Q11(i, j);
      full(i, n + j) = q.Q21(j, i);  // top-right block is Q21^T
      full(n + i, j) = q.Q21(i, j);
      full(n + i, n + j) = q.Q22(i, j);
    }
  }
  return eig_sym_extremes(sym(full)).first;
}

MonitorReport monitor_trajectory(const std::vector<MonitorSample>& rows,
                                 const UncertainPlant& plant,
                                 const StaParams& sp, const LyapCert& cert,
                                 std::optional<double> t_conv,
                                 double x_floor) {
  cert.validate();
  sp.validate();
  if (rows.empty()) {
    throw input_error("monitor_trajectory: empty trace");
  }
  for (const MonitorSample& r : rows) {
    if (r.ctx.size() != plant.ctx_dim || r.x.size() != plant.n ||
        r.v.size() != plant.n) {
      throw input_error("monitor_trajectory: trace row dimension mismatch");
    }
  }
  double dt = 0.0;
  if (rows.size() >= 2) {
    dt = rows[1].t - rows[0].t;
    if (!(dt > 0.0)) {
      throw input_error("monitor_trajectory: time stamps must increase");
    }
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const double step = rows[i + 1].t - rows[i].t;
      if (std::abs(step - dt) > 1e-9 * std::max(1.0, dt)) {
        throw input_error("monitor_trajectory: trace grid is not uniform");
      }
    }
  }

  MonitorReport rep;
  rep.samples = rows.size();
  const double conv_t =
      t_conv ? *t_conv : std::numeric_limits<double>::infinity();

  std::vector<double> v_series(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vec zeta = zeta_coords(rows[i].t, rows[i].ctx, rows[i].v, plant, sp);
    v_series[i] = lyap_value(zeta, cert);
    rep.max_v = std::max(rep.max_v, v_series[i]);

    if (rows[i].t < conv_t) ++rep.pre_convergence;

    if (rows[i].t >= conv_t) {
      double z_sq = 0.0;
      for (std::size_t k = plant.n; k < 2 * plant.n; ++k) {
        z_sq += zeta[k] * zeta[k];
      }
      rep.max_post_conv_residual =
          std::max(rep.max_post_conv_residual, std::sqrt(z_sq));
    }

    if (norm(rows[i].x) >= x_floor) {
      const QBlocks q = build_q_blocks(rows[i].t, rows[i].ctx, plant, sp, cert);
      const double lmin = assembled_q_lambda_min(q);
      if (rep.q_checked == 0 || lmin < rep.min_q_lambda_min) {
        rep.min_q_lambda_min = lmin;
      }
      ++rep.q_checked;
      if (!q_positive_definite(q, default_pd_margin(q))) {
        rep.q_pd_everywhere = false;
      }
    }
  }

  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (!(rows[i].t < conv_t)) continue;
    ++rep.vdot_checked;
    const double vdot = (v_series[i + 1] - v_series[i - 1]) / (2.0 * dt);
    if (vdot < 0.0) ++rep.vdot_negative;
  }
  rep.vdot_negative_fraction =
      rep.vdot_checked == 0
          ? 1.0
          : static_cast<double>(rep.vdot_negative) /
                static_cast<double>(rep.vdot_checked);
  return rep;
}

}  // namespace mgsta
