/**
 * @file plants.hpp
 * @brief Concrete uncertain plants: a four-wheeled omnidirectional mobile
 * robot under tracking control, and a two-channel coupled toy system.
 *
 * The robot's controlled state is the sliding variable
 * s = Theta*(q - q_d) + (q_dot - qd_dot); its uncertain decomposition is
 * derived from the rigid-body dynamics with the viscous/dry friction and
 * the Coriolis term treated as unknown. The plant evaluation context is
 * (q_tilde, q_dot) in R^6: the tracking error and the task-space rates.
 */
#pragma once

#include <functional>

#include "mgsta/matrix.hpp"
#include "mgsta/plant.hpp"
#include "mgsta/sta.hpp"

namespace mgsta {

/// Physical and nominal parameters of the drive and body.
struct RobotParams {
  double m1 = 2.8;       ///< body mass [kg]
  double m2 = 0.38;      ///< wheel mass [kg]
  double J1 = 0.0608;    ///< body inertia [kg m^2]
  double J2 = 3.24e-4;   ///< wheel inertia about the motor shaft [kg m^2]
  double J3 = 4.69e-4;   ///< wheel inertia perpendicular to the shaft
  double Jm = 5.7e-7;    ///< motor shaft inertia [kg m^2]
  double L = 0.1100;     ///< center-to-wheel distance [m]
  double l1 = 0.1524;    ///< center-to-front length [m]
  double l2 = 0.1505;    ///< center-to-side length [m]
  double r = 0.042;      ///< wheel radius [m]
  double ka = 0.013;     ///< torque constant [N m / A]
  double ra = 1.9;       ///< armature resistance [ohm]
  double re = 58.0;      ///< gear ratio
  Vec fv_diag = {1e-4, 1e-4, 1e-4};  ///< viscous friction coefficients
  Vec fd_diag = {1e-4, 1e-4, 1e-4};  ///< dry friction coefficients
  Mat Mn = 7.7341 * Mat::identity(3);  ///< nominal inertia matrix
  double kan = 0.013;  ///< nominal torque constant
  double ran = 1.9;    ///< nominal armature resistance
  double ren = 57.0;   ///< nominal gear ratio

  /// Throws input_error on non-positive physical values or a singular Mn.
  void validate() const;
};

/// Task-space configuration (x, y, theta) and its rates.
struct RobotState {
  Vec q = Vec(3);
  Vec qdot = Vec(3);
};

/// Trajectory to track plus the sliding-gain matrix.
struct Reference {
  std::function<Vec(double)> q_d;      ///< desired configuration
  std::function<Vec(double)> qd_dot;   ///< its first derivative
  std::function<Vec(double)> qd_ddot;  ///< its second derivative
  Mat Theta = 2.0 * Mat::identity(3);  ///< positive definite sliding gain

  /// Throws input_error if callbacks are missing or Theta is not
  /// symmetric positive definite.
  void validate() const;
};

/// Straight-line reference q_d(t) = offset + t * rate.
Reference linear_reference(const Vec& rate, const Vec& offset,
                           const Mat& theta);

/// The 3x4 aggregation map E from wheel forces to task-space inputs.
struct WheelMap {
  double e[3][4];
};

/// Assembled model matrices at a state.
struct RobotMatrices {
  Mat M;   ///< inertia (constant in the state)
  Mat R;   ///< planar rotation by theta
  Mat C;   ///< Coriolis/centrifugal term, depends on theta_dot
  Vec fv;  ///< viscous friction force at qdot
  Vec fd;  ///< dry friction force at qdot
  WheelMap E;
};

/// Exact assembly of the model matrices.
RobotMatrices robot_matrices(const RobotState& state, const RobotParams& p);

/// E alone (state independent).
WheelMap wheel_map(const RobotParams& p);

/// Per-wheel voltages nu = E^+ u with E^+ the right pseudo-inverse of E.
/// Reporting aid only; the loop closes on the aggregated input u.
Vec wheel_voltages(const Vec& u, const RobotParams& p);

/// Ground-truth acceleration: qddot = M^-1 [ (ka re / ra) R^T(theta) u
/// - C qdot - f_v - f_d + w ] with u the aggregated input.
Vec robot_accel(const RobotState& state, const Vec& u, const Vec& w,
                const RobotParams& p);

/// Sliding variable s = Theta*(q - q_d(t)) + (qdot - qd_dot(t)).
Vec sliding_state(const RobotState& state, const Reference& ref, double t);

/// Plant evaluation context (q_tilde, qdot) from a full state.
Vec robot_ctx(const RobotState& state, const Reference& ref, double t);

/// Robot plant plus the bookkeeping terms of its decomposition that fall
/// outside the generic callback set.
struct RobotPlant {
  UncertainPlant plant;

  /// The vanishing disturbance w1 absorbed into f1 = Delta1*phi1(s):
  /// w1 = alpha * Delta1 * ||s||^-p * s. The decomposition reconstructs
  /// f1 + f2 = f_true + w1 exactly.
  std::function<Vec(double, const Vec&)> decomposition_disturbance;

  /// Residual of the derivative identity: the time derivative of
  /// (I+DeltaG)^-1 f2 equals Delta2*phi2(s) + Delta3*s_dot + residual,
  /// where the residual is proportional to the tracking error q_tilde and
  /// vanishes on the sliding manifold.
  std::function<Vec(double, const Vec&)> decomposition_residual;

  /// Physical perturbation f with zero external disturbance:
  /// Theta*qt_dot - qd_ddot + M^-1 [-C qdot - f_v - f_d].
  std::function<Vec(double, const Vec&)> f_true;
};

/**
 * Uncertain decomposition of the sliding dynamics. Requires sp.beta == 1
 * (the f1 = Delta1*phi1 identity needs a unit linear weight) and a
 * reference with constant qd_dot. The evaluation callback throws
 * input_error when |theta| >= pi/2, where the input-matrix assumption
 * breaks down.
 */
RobotPlant robot_uncertain_plant(const RobotParams& p, const Reference& ref,
                                 const StaParams& sp);

/// Two-channel system with a time-varying cross coupling of magnitude
/// at most g_bar in the input matrix, and no other uncertainty.
struct AcademicParams {
  double g_bar = 0.0;  ///< coupling amplitude, >= 0
  double omega = 10.0; ///< angular frequency of the default signal
  double phase = 1.5707963267948966;  ///< phase; default peaks at t = 0

  void validate() const;
};

/// G0 = I2, off-diagonal coupling g(t) = clamp(g_bar*sin(omega t + phase)),
/// all perturbation terms zero, ctx == x.
UncertainPlant academic_plant(const AcademicParams& p);

}  // namespace mgsta
