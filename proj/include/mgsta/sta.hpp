/**
 * @file sta.hpp
 * @brief Multivariable generalized super-twisting controller core.
 *
 * The controller acts on a state x (typically a sliding variable) through the
 * pair of nonlinearities
 *
 *   phi1(x) = (alpha*||x||^-p + beta) * x
 *   phi2(x) = J(x) * phi1(x) = c(x) * phi1(x)
 *
 * with J(x) the Jacobian of phi1 and c(x) = alpha*(1-p)*||x||^-p + beta a
 * scalar. Both nonlinearities extend continuously to 0 at the origin for
 * p in (0, 1/2); at p = 1/2 phi2 has a bounded discontinuity there, and the
 * same zero extension is used. The normalized Jacobian script_j = J/c is
 * symmetric with one eigenvalue exactly 1 along x and the remaining ones
 * equal to (alpha + beta*||x||^p) / (alpha*(1-p) + beta*||x||^p), which lies
 * in [1, 1/(1-p)).
 */
#pragma once

#include "mgsta/matrix.hpp"

namespace mgsta {

/// Gains and shape parameters of the controller.
struct StaParams {
  double alpha = 1.0;  ///< weight of the norm-scaled term, > 0
  double beta = 1.0;   ///< weight of the linear term, > 0
  double b = 1.0;      ///< integral-branch scale, > 0
  double p = 0.5;      ///< homogeneity exponent, in (0, 1/2]
  double k1 = 1.0;     ///< proportional-branch gain, > 0
  double k2 = 1.0;     ///< integral-branch gain, > 0

  /// Validates only the nonlinearity shape (alpha, beta, b, p). Useful
  /// before gains have been designed.
  void validate_shape() const;

  /// Throws input_error if any constraint fails (shape and gains).
  void validate() const;
};

/// Integrator state of the controller.
struct ControllerState {
  Vec v;  ///< integral term, dimension n
};

/// Norms below this are treated as exactly zero in phi1/phi2.
inline constexpr double kOriginGuard = 1e-150;

/// phi1(x); returns the zero vector when ||x|| < kOriginGuard.
Vec phi1(const Vec& x, const StaParams& sp);

/// phi2(x) = c(x) * phi1(x); zero vector at the origin.
Vec phi2(const Vec& x, const StaParams& sp);

/// Scalar c(x) = alpha*(1-p)*||x||^-p + beta. Throws input_error at the
/// origin (the quantity diverges there for p > 0).
double c_scalar(const Vec& x, const StaParams& sp);

/// Jacobian of phi1:
/// J(x) = (alpha*||x||^-p + beta) I - alpha*p*(||x||^-p / ||x||^2) x x^T.
/// Symmetric by construction. Throws input_error at the origin.
SymMat jacobian_phi1(const Vec& x, const StaParams& sp);

/// Normalized Jacobian script_j(x) = J(x) / c(x). Throws at the origin.
SymMat script_j(const Vec& x, const StaParams& sp);

/// Upper bound of script_j's spectrum at radius ||x||:
/// (alpha + beta*r^p) / (alpha*(1-p) + beta*r^p).
double script_j_offaxis_eigenvalue(double radius, const StaParams& sp);

/// Control value and integrator derivative:
///   u = -k1 * phi1(x) + b * G0^-1 * v,   v_dot = -k2 * phi2(x).
struct ControlOutput {
  Vec u;
  Vec v_dot;
};

/// Evaluates the control law. g0 is the nominal input matrix at the current
/// point; its inversion uses the kernel's singularity threshold.
ControlOutput control_and_derivative(const Vec& x, const ControllerState& cs,
                                     const Mat& g0, const StaParams& sp);

}  // namespace mgsta
