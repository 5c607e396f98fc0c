/**
 * @file lyapunov.hpp
 * @brief Quadratic certificate machinery for the closed loop.
 *
 * The certificate works in the coordinates zeta = (phi1(x), z) with
 * z = v + b^-1 (I+DeltaG)^-1 f2, through V = 1/2 zeta^T P zeta where
 * P = [[p1 I, -I], [-I, p2 I]] (positive definite iff p1*p2 > 1). Along
 * closed-loop trajectories V_dot = -c(x) * zeta^T Q(t,x) zeta, and the
 * stability argument reduces to Q being positive definite pointwise. This
 * module builds the Q blocks, tests positive definiteness via the Schur
 * complement, and monitors simulated traces: the decrease of V is checked
 * by central finite differences (the Q form needs x_dot, which an explicit
 * Euler trace only approximates; the PD test is pointwise instead).
 */
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mgsta/matrix.hpp"
#include "mgsta/plant.hpp"
#include "mgsta/sta.hpp"

namespace mgsta {

/// Certificate parameters of the quadratic form.
struct LyapCert {
  double p1 = 0.0;
  double p2 = 0.0;

  /// Throws input_error unless p1, p2 > 0 and p1*p2 > 1.
  void validate() const;
};

/// The three distinct blocks of Q plus the scalar factor c at the point.
struct QBlocks {
  SymMat Q11;
  Mat Q21;
  SymMat Q22;
  double c;
};

/// Certificate coordinates zeta = (phi1(x), v + b^-1 (I+DeltaG)^-1 f2).
/// The plant is evaluated at ctx; x is taken from that evaluation.
/// Throws singular_matrix_error if I + DeltaG is numerically singular.
Vec zeta_coords(double t, const Vec& ctx, const Vec& v,
                const UncertainPlant& plant, const StaParams& sp);

/// V = 1/2 (p1 ||z1||^2 - 2 z1.z2 + p2 ||z2||^2).
double lyap_value(const Vec& zeta, const LyapCert& cert);

/// Q blocks at a plant evaluation point. Throws input_error when the
/// controlled state at ctx is at the origin (c and script_j are undefined).
QBlocks build_q_blocks(double t, const Vec& ctx, const UncertainPlant& plant,
                       const StaParams& sp, const LyapCert& cert);

/// Schur-complement positive definiteness: Q22 - margin*I must be positive
/// definite, and then Q11 - Q21^T Q22^-1 Q21 must have lambda_min > margin.
bool q_positive_definite(const QBlocks& q, double margin);

/// Default PD margin for a block set: 1e-12 * max block magnitude. This is
/// a numerical-rank tolerance (a few orders above the rounding error of
/// assembling the blocks), not a robustness margin: designed gains can make
/// the blocks huge (1e10 and beyond) while the certified lambda_min stays
/// O(1), so any fixed *relative* margin much larger than the assembly noise
/// would misclassify genuinely positive definite instances.
double default_pd_margin(const QBlocks& q);

/// lambda_min of the assembled 2n x 2n matrix [[Q11, Q21^T], [Q21, Q22]].
double assembled_q_lambda_min(const QBlocks& q);

/// One trace row ready for monitoring: plant context, controlled state and
/// integrator state at a time stamp.
struct MonitorSample {
  double t = 0.0;
  Vec ctx;
  Vec x;
  Vec v;
};

/// Trajectory-level certificate report.
struct MonitorReport {
  std::size_t samples = 0;            ///< rows consumed
  std::size_t pre_convergence = 0;    ///< rows strictly before t_conv
  std::size_t vdot_checked = 0;       ///< interior pre-convergence rows
  std::size_t vdot_negative = 0;      ///< of those, rows with V_dot < 0
  double vdot_negative_fraction = 1.0;
  std::size_t q_checked = 0;          ///< rows with x away from the origin
  double min_q_lambda_min = 0.0;      ///< min over rows of assembled-Q
                                      ///< lambda_min (0 when none checked)
  bool q_pd_everywhere = true;
  double max_post_conv_residual = 0.0;  ///< max ||z|| at rows >= t_conv
  double max_v = 0.0;                   ///< max V over the trace
};

/**
 * Walks a uniformly sampled trajectory and reports (a) the fraction of
 * pre-convergence samples with central-difference V_dot < 0, (b) the worst
 * lambda_min of Q, (c) the post-convergence residual ||z||.
 *
 * t_conv = nullopt treats the whole trace as pre-convergence. Rows with
 * ||x|| below x_floor are skipped for the Q test (Q is undefined at the
 * origin) but still enter the V series.
 */
MonitorReport monitor_trajectory(const std::vector<MonitorSample>& rows,
                                 const UncertainPlant& plant,
                                 const StaParams& sp, const LyapCert& cert,
                                 std::optional<double> t_conv,
                                 double x_floor = 1e-9);

}  // namespace mgsta
