/**
 * @file bounds.hpp
 * @brief Sampling-based estimation of the closed-loop analysis constants.
 *
 * Every constant consumed by the gain-design stage is an extremum of a
 * matrix functional (eigenvalue of a symmetric part or a Gramian) of the
 * plant's uncertainty callbacks. This module estimates them by exhaustive
 * evaluation over a deterministic tensor grid, a logarithmic near-origin
 * shell (the normalized-Jacobian bounds are attained as ||x|| -> 0), and
 * optional seeded random refinement. A configurable safety factor inflates
 * each estimate on its conservative side: upper bounds grow, lower bounds
 * shrink.
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "mgsta/matrix.hpp"
#include "mgsta/plant.hpp"
#include "mgsta/sta.hpp"

namespace mgsta {

/// Sampling region: a context box crossed with a time interval.
struct SamplingDomain {
  Vec ctx_lo;  ///< per-axis lower corner, dimension = plant ctx_dim
  Vec ctx_hi;  ///< per-axis upper corner, strictly above ctx_lo
  double t0 = 0.0;                 ///< interval start
  double t1 = 0.0;                 ///< interval end, >= t0
  std::size_t time_points = 2;     ///< grid points over [t0, t1]
  std::size_t grid_points = 3;     ///< grid points per context axis, >= 2
  std::size_t random_points = 0;   ///< extra seeded uniform samples
  std::uint64_t seed = 0;          ///< RNG seed for the random refinement
  std::size_t shell_radii = 7;     ///< log-spaced radii of the origin shell
  double shell_r_min = 1e-6;       ///< smallest shell radius
  double shell_r_max = 1.0;        ///< largest shell radius
  std::size_t shell_random_dirs = 8;  ///< seeded directions beyond the
                                      ///< deterministic axis/corner set

  /// Throws input_error on malformed boxes or counts.
  void validate(std::size_t ctx_dim) const;
};

/// The full set of constants consumed by feasibility and gain design.
struct BoundConstants {
  double g_m = 0.0;  ///< lower eigenvalue bound of G + G^T, > 0
  double g_M = 0.0;  ///< upper eigenvalue bound of G + G^T
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;  ///< spectral norms of
                                                    ///< Delta1..Delta3
  double gamma1 = 0.0;  ///< lower bound of 2 Sym{script_j (I+DeltaG)}, > 0
  double gamma2 = 0.0;  ///< upper bound of the same pencil
  double gamma3 = 0.0;  ///< upper bound of Gram{script_j G}
  double gamma4 = 0.0;  ///< upper bound of 2 Sym{DeltaG script_j G}
  double gamma5 = 0.0;  ///< upper bound of Gram{DeltaG^T}
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
  double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0, theta4 = 0.0;
  double theta5 = 0.0, theta6 = 0.0, theta7 = 0.0, theta8 = 0.0;
  double theta9 = 0.0, theta10 = 0.0, theta11 = 0.0, theta12 = 0.0;

  /// Named access to every field, in serialization order.
  static const std::array<std::pair<const char*, double BoundConstants::*>,
                          26>&
  fields();

  /// Checks ordering invariants (g_m > 0, g_M >= g_m, deltas >= 0,
  /// gamma2 >= gamma1 > 0, gamma3..5 >= 0, all finite). Throws input_error.
  void validate() const;
};

/// Location of the sample that set a constant.
struct SampleRef {
  double t = 0.0;
  Vec ctx;
};

/// Estimation output: safety-scaled constants, the raw pre-safety extrema,
/// and the argmax/argmin sample for each constant.
struct BoundEstimate {
  BoundConstants constants;
  BoundConstants raw;
  std::map<std::string, SampleRef> witness;
  std::size_t samples = 0;
};

/// Subset returned by estimate_assumption.
struct AssumptionBounds {
  double g_m, g_M, delta1, delta2, delta3, gamma1, gamma2;
};

/// Subset returned by estimate_gammas.
struct GammaBounds {
  double gamma3, gamma4, gamma5;
};

/// Subset returned by estimate_mus_thetas.
struct MuThetaBounds {
  double mu1, mu2, mu3, mu4;
  double theta1, theta2, theta3, theta4, theta5, theta6;
  double theta7, theta8, theta9, theta10, theta11, theta12;
};

/**
 * Single-pass estimation of all 26 constants.
 *
 * Throws assumption_violation (with the witness sample) if any sample has
 * lambda_min(G + G^T) <= 0 or lambda_min(2 Sym{script_j (I+DeltaG)}) <= 0:
 * both break the structural assumptions and no constant set exists.
 * The safety factor must be >= 1.
 */
BoundEstimate estimate_all(const UncertainPlant& plant,
                           const SamplingDomain& dom, const StaParams& sp,
                           double safety = 1.05);

/// Input-matrix and perturbation-norm constants only.
AssumptionBounds estimate_assumption(const UncertainPlant& plant,
                                     const SamplingDomain& dom,
                                     const StaParams& sp,
                                     double safety = 1.05);

/// Cross-term constants of the input-matrix uncertainty only.
GammaBounds estimate_gammas(const UncertainPlant& plant,
                            const SamplingDomain& dom, const StaParams& sp,
                            double safety = 1.05);

/// Derivative-coupling constants only (A = Delta3 / c).
MuThetaBounds estimate_mus_thetas(const UncertainPlant& plant,
                                  const SamplingDomain& dom,
                                  const StaParams& sp, double safety = 1.05);

}  // namespace mgsta
