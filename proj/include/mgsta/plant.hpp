/**
 * @file plant.hpp
 * @brief Uncertain-plant decomposition interface.
 *
 * The closed-loop analysis works on plants written as
 *
 *   x_dot = f(t, .) + G(t, .) u,        G = (I + DeltaG) G0,
 *   f = Delta1 * phi1(x) + f2,
 *   d/dt[(I + DeltaG)^-1 f2] = Delta2 * phi2(x) + Delta3 * x_dot.
 *
 * For plants whose uncertainty terms depend on more state than the controlled
 * variable x itself (e.g. a mechanical system where x is a sliding variable
 * but friction depends on joint rates), evaluation happens at a plant-declared
 * context vector `ctx`; each evaluation also reports the controlled state x
 * at that context. For memoryless plants ctx == x.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mgsta/matrix.hpp"

namespace mgsta {

/// One evaluation of the uncertain decomposition at (t, ctx).
struct PlantEval {
  Mat G0;      ///< nominal input matrix
  Mat DeltaG;  ///< multiplicative input uncertainty
  Mat Delta1;  ///< phi1-proportional perturbation coefficient
  Mat Delta2;  ///< phi2-proportional derivative coefficient
  Mat Delta3;  ///< x_dot-proportional derivative coefficient
  Vec f2;      ///< slowly varying perturbation component
  Vec x;       ///< controlled state at this context
};

/// Uncertain plant described by an evaluation callback over (t, ctx).
struct UncertainPlant {
  std::size_t n = 0;        ///< controlled-state dimension
  std::size_t ctx_dim = 0;  ///< sampling-context dimension
  std::vector<std::string> ctx_names;  ///< per-axis labels for reports

  /// Full decomposition at a context point.
  std::function<PlantEval(double t, const Vec& ctx)> at;

  /// Section: a representative context realizing controlled state x at time
  /// t. Used to probe the near-origin limit of x-dependent quantities.
  std::function<Vec(double t, const Vec& x)> ctx_for_state;

  /// Convenience accessors matching the decomposition names.
  Mat G0(double t, const Vec& ctx) const { return at(t, ctx).G0; }
  Mat DeltaG(double t, const Vec& ctx) const { return at(t, ctx).DeltaG; }
  Mat Delta1(double t, const Vec& ctx) const { return at(t, ctx).Delta1; }
  Mat Delta2(double t, const Vec& ctx) const { return at(t, ctx).Delta2; }
  Mat Delta3(double t, const Vec& ctx) const { return at(t, ctx).Delta3; }
  Vec f2(double t, const Vec& ctx) const { return at(t, ctx).f2; }

  /// True input matrix G = (I + DeltaG) G0 at a context point.
  Mat G(double t, const Vec& ctx) const {
    const PlantEval e = at(t, ctx);
    return (Mat::identity(n) + e.DeltaG) * e.G0;
  }
};

/// Plant with constant input matrix g0 and no uncertainty (ctx == x).
/// Useful as the fully known baseline in analysis and tests.
UncertainPlant constant_plant(const Mat& g0);

/// Identity-input baseline of dimension n.
UncertainPlant identity_plant(std::size_t n);

}  // namespace mgsta
