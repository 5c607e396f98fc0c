/**
 * @file gain_design.hpp
 * @brief Constant-gain synthesis from estimated bound constants.
 *
 * Layout of the procedure:
 *   1. feasibility: gamma1*g_m - gamma4 - 2*sqrt(gamma3*gamma5) > 0 is
 *      necessary and sufficient for stabilizing constant gains to exist.
 *   2. certificate-parameter search: scan p2 on a decreasing log grid below
 *      gamma1/mu4, and for each p2 scan p1 on an increasing log grid, until
 *      the effective-margin and discriminant-growth conditions plus
 *      p1*p2 > 1 hold (they always do for p1 large enough, p2 small enough
 *      whenever step 1 passes).
 *   3. gains: k2 = b*p1/p2 and k1 inside the open interval where the scalar
 *      quadratic alpha2*k1^2 + alpha1*k1 + alpha0 is negative (midpoint).
 */
#pragma once

#include <string>
#include <vector>

#include "mgsta/bounds.hpp"
#include "mgsta/sta.hpp"

namespace mgsta {

/// Grid options for the certificate-parameter search.
struct SearchOptions {
  double p2_start_fraction = 0.99;  ///< start at this fraction of gamma1/mu4
  double p2_fallback = 10.0;        ///< p2 start when mu4 <= 0
  std::size_t p2_steps = 48;        ///< points on the decreasing p2 grid
  double p2_decades = 6.0;          ///< decades spanned downward by p2
  std::size_t p1_steps = 160;       ///< points on the increasing p1 grid
  double p1_min = 1e-2;             ///< smallest p1 tried
  double p1_max = 1e12;             ///< largest p1 tried
  double k1_cap = 1e6;  ///< upper end of the k1 interval when it is unbounded

  void validate() const;
};

/// Everything the design stage consumes.
struct DesignInputs {
  BoundConstants constants;
  StaParams sp;  ///< k1, k2 fields are ignored on input
  SearchOptions search;
};

/// The six scalar design functions evaluated at (p1, p2).
struct DesignFunctions {
  double Xi1, Xi2, Xi3;
  double Gamma0, Gamma1, Gamma2;
};

/// Coefficients of the k1 quadratic at (p1, p2).
struct Alphas {
  double alpha0, alpha1, alpha2;
};

/// Outcome of the existence test.
struct FeasibilityResult {
  bool feasible;
  double margin;  ///< gamma1*g_m - gamma4 - 2*sqrt(gamma3*gamma5)
};

/// Selected gains plus every intermediate, for auditability.
struct DesignResult {
  double p1 = 0.0, p2 = 0.0;
  double k1 = 0.0, k2 = 0.0;
  double k1_lo = 0.0, k1_hi = 0.0;  ///< open admissible interval for k1
  DesignFunctions fns{};
  Alphas alphas{};
  double gamma1_tilde = 0.0;       ///< gamma1 - p2*mu4
  double feasibility_margin = 0.0;
};

/// One inequality of the verification report.
struct CheckLine {
  std::string name;
  bool pass;
  double slack;  ///< positive iff the strict inequality holds
};

/// Re-evaluation of every design inequality at a candidate result.
struct VerifyReport {
  std::vector<CheckLine> checks;
  bool all_pass = false;
};

/// Existence test on the constants alone.
FeasibilityResult check_feasibility(const BoundConstants& c);

/// The six design functions at (p1, p2). Requires p1, p2 > 0.
DesignFunctions eval_xi_gamma(double p1, double p2, const DesignInputs& in);

/// The k1-quadratic coefficients at (p1, p2). Throws input_error when
/// gamma1 - p2*mu4 <= 0 (p2 too large for this plant).
Alphas eval_alphas(double p1, double p2, const DesignInputs& in);

/**
 * Full synthesis. Throws infeasible_error when the existence test fails
 * (carrying the margin) and search_exhausted when the grid scan ends
 * without a valid (p1, p2), with a diagnostic naming the last failing
 * condition.
 */
DesignResult design_gains(const DesignInputs& in);

/// Re-checks every inequality behind a DesignResult and reports slacks.
VerifyReport verify_gain_selection(const DesignResult& r,
                                   const DesignInputs& in);

/**
 * Assessment of externally chosen gains (k1, k2): fixes p1/p2 = k2/b as the
 * design relation dictates, scans p2 over its admissible range, and returns
 * the report at the p2 maximizing the worst slack. Lets hand-tuned gains be
 * audited against the same inequalities a designed result must satisfy.
 */
VerifyReport assess_gains(double k1, double k2, const DesignInputs& in);

}  // namespace mgsta
