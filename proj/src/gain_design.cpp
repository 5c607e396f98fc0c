#include "mgsta/gain_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgsta/errors.hpp"

namespace mgsta {

namespace {

/// Shared inequality re-evaluation for a concrete (p1, p2, k1, k2).
VerifyReport report_at(double p1, double p2, double k1, double k2,
                       const DesignInputs& in) {
  const BoundConstants& c = in.constants;
  VerifyReport rep;
  auto add = [&rep](const std::string& name, double slack) {
    rep.checks.push_back(CheckLine{name, slack > 0.0, slack});
  };

  const FeasibilityResult feas = check_feasibility(c);
  add("existence margin gamma1*g_m - gamma4 - 2*sqrt(gamma3*gamma5)",
      feas.margin);

  const double gamma1_tilde = c.gamma1 - p2 * c.mu4;
  add("p2 admissibility gamma1 - p2*mu4", gamma1_tilde);

  const DesignFunctions f = eval_xi_gamma(p1, p2, in);
  add("effective margin gamma1*g_m - gamma4 - Gamma0",
      c.gamma1 * c.g_m - c.gamma4 - f.Gamma0);
  add("discriminant growth Gamma1*p1 - Gamma2", f.Gamma1 * p1 - f.Gamma2);
  add("certificate coupling p1*p2 - 1", p1 * p2 - 1.0);
  add("gain relation |k2 - b*p1/p2| within 1e-9 relative",
      1e-9 * std::max(1.0, std::abs(k2)) - std::abs(k2 - in.sp.b * p1 / p2));

  if (gamma1_tilde > 0.0) {
    const Alphas a = eval_alphas(p1, p2, in);
    add("linear coefficient -alpha1", -a.alpha1);
    const double disc = a.alpha1 * a.alpha1 - 4.0 * a.alpha2 * a.alpha0;
    add("quadratic discriminant alpha1^2 - 4*alpha2*alpha0", disc);
    add("quadratic negativity -(alpha2*k1^2 + alpha1*k1 + alpha0)",
        -(a.alpha2 * k1 * k1 + a.alpha1 * k1 + a.alpha0));
  } else {
    const double bad = -std::numeric_limits<double>::infinity();
    add("linear coefficient -alpha1", bad);
    add("quadratic discriminant alpha1^2 - 4*alpha2*alpha0", bad);
    add("quadratic negativity -(alpha2*k1^2 + alpha1*k1 + alpha0)", bad);
  }

  rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                             [](const CheckLine& l) { return l.pass; });
  return rep;
}

std::vector<double> p2_grid(const DesignInputs& in) {
  const SearchOptions& opt = in.search;
  const double start = in.constants.mu4 > 0.0
                           ? opt.p2_start_fraction * in.constants.gamma1 /
                                 in.constants.mu4
                           : opt.p2_fallback;
  std::vector<double> grid;
  grid.reserve(opt.p2_steps);
  for (std::size_t j = 0; j < opt.p2_steps; ++j) {
    const double frac = opt.p2_steps == 1
                            ? 0.0
                            : static_cast<double>(j) /
                                  static_cast<double>(opt.p2_steps - 1);
    grid.push_back(start * std::pow(10.0, -opt.p2_decades * frac));
  }
  return grid;
}

}  // namespace

void SearchOptions::validate() const {
  if (!(p2_start_fraction > 0.0) || !(p2_start_fraction < 1.0)) {
    throw input_error("SearchOptions: p2_start_fraction must be in (0, 1)");
  }
  if (!(p2_fallback > 0.0)) {
    throw input_error("SearchOptions: p2_fallback must be > 0");
  }
  if (p2_steps < 2 || p1_steps < 2) {
    throw input_error("SearchOptions: grids need at least 2 points");
  }
  if (!(p2_decades > 0.0)) {
    throw input_error("SearchOptions: p2_decades must be > 0");
  }
  if (!(p1_min > 0.0) || !(p1_max > p1_min)) {
    throw input_error("SearchOptions: need 0 < p1_min < p1_max");
  }
  if (!(k1_cap > 0.0)) {
    throw input_error("SearchOptions: k1_cap must be > 0");
  }
}

FeasibilityResult check_feasibility(const BoundConstants& c) {
  c.validate();
  const double margin =
      c.gamma1 * c.g_m - c.gamma4 - 2.0 * std::sqrt(c.gamma3 * c.gamma5);
  return FeasibilityResult{margin > 0.0, margin};
}

DesignFunctions eval_xi_gamma(double p1, double p2, const DesignInputs& in) {
  if (!(p1 > 0.0) || !(p2 > 0.0)) {
    throw input_error("eval_xi_gamma: p1 and p2 must be positive");
  }
  const BoundConstants& c = in.constants;
  const double b = in.sp.b;

  DesignFunctions f;
  f.Xi1 = c.theta8 + c.theta9 * p2 + c.theta10 * p2 / (b * p1) +
          c.theta11 * p2 * p2 / (b * p1) + c.theta12 / (b * p1);
  f.Xi2 = (c.theta3 + (c.theta4 + c.theta5) * p2 + c.theta7 * p2 * p2) / b;
  f.Xi3 = (c.gamma3 + c.theta1 * p2 + c.theta2 * p2 * p2) / b;
  f.Gamma0 = (f.Xi2 + (c.gamma1 - p2 * c.mu4) * c.mu2) / p1 +
             (c.theta6 + c.mu4 * c.g_m) * p2;
  const double core = f.Gamma0 + c.gamma4 - c.gamma1 * c.g_m;
  f.Gamma1 = core * core - 4.0 * b * f.Xi3 * c.gamma5;
  f.Gamma2 = 4.0 * f.Xi3 *
             ((2.0 * b / p2 + c.mu1 + c.mu3 / p1) * (c.gamma1 - p2 * c.mu4) +
              f.Xi1);
  return f;
}

Alphas eval_alphas(double p1, double p2, const DesignInputs& in) {
  if (!(p1 > 0.0) || !(p2 > 0.0)) {
    throw input_error("eval_alphas: p1 and p2 must be positive");
  }
  const BoundConstants& c = in.constants;
  const double b = in.sp.b;
  const double gamma1_tilde = c.gamma1 - p2 * c.mu4;
  if (!(gamma1_tilde > 0.0)) {
    throw input_error(
        "eval_alphas: gamma1 - p2*mu4 must be positive (p2 too large for "
        "this plant)");
  }
  const DesignFunctions f = eval_xi_gamma(p1, p2, in);
  Alphas a;
  a.alpha2 = f.Xi3 / gamma1_tilde;
  a.alpha1 = (f.Xi2 + c.gamma4 * p1 + c.theta6 * p1 * p2) / gamma1_tilde +
             c.mu2 - c.g_m * p1;
  a.alpha0 = 2.0 * b * p1 / p2 + c.mu1 * p1 + c.mu3 +
             (c.gamma5 * b * p1 + f.Xi1) * p1 / gamma1_tilde;
  return a;
}

DesignResult design_gains(const DesignInputs& in) {
  in.sp.validate_shape();
  in.search.validate();
  const FeasibilityResult feas = check_feasibility(in.constants);
  if (!feas.feasible) {
    throw infeasible_error(
        "design_gains: existence test fails, margin = " +
            std::to_string(feas.margin) +
            " (gamma1*g_m must exceed gamma4 + 2*sqrt(gamma3*gamma5))",
        feas.margin);
  }

  const SearchOptions& opt = in.search;
  const BoundConstants& c = in.constants;
  std::string last_fail = "no grid point evaluated";

  for (const double p2 : p2_grid(in)) {
    const double gamma1_tilde = c.gamma1 - p2 * c.mu4;
    if (!(gamma1_tilde > 0.0)) {
      last_fail = "p2 admissibility gamma1 - p2*mu4 > 0";
      continue;
    }
    for (std::size_t i = 0; i < opt.p1_steps; ++i) {
      const double frac =
          static_cast<double>(i) / static_cast<double>(opt.p1_steps - 1);
      const double p1 = opt.p1_min * std::pow(opt.p1_max / opt.p1_min, frac);
      if (!(p1 * p2 > 1.0)) {
        last_fail = "certificate coupling p1*p2 > 1";
        continue;
      }
      const DesignFunctions f = eval_xi_gamma(p1, p2, in);
      if (!(c.gamma1 * c.g_m - c.gamma4 - f.Gamma0 > 0.0)) {
        last_fail = "effective margin gamma1*g_m - gamma4 - Gamma0 > 0";
        continue;
      }
      if (!(f.Gamma1 * p1 > f.Gamma2)) {
        last_fail = "discriminant growth Gamma1*p1 > Gamma2";
        continue;
      }
      const Alphas a = eval_alphas(p1, p2, in);
      if (!(a.alpha1 < 0.0)) {
        last_fail = "linear coefficient alpha1 < 0";
        continue;
      }
      const double disc = a.alpha1 * a.alpha1 - 4.0 * a.alpha2 * a.alpha0;
      if (!(disc > 0.0)) {
        last_fail = "quadratic discriminant alpha1^2 - 4*alpha2*alpha0 > 0";
        continue;
      }

      double k1_lo, k1_hi;
      if (a.alpha2 > 0.0) {
        const double root = std::sqrt(disc);
        k1_lo = (-a.alpha1 - root) / (2.0 * a.alpha2);
        k1_hi = (-a.alpha1 + root) / (2.0 * a.alpha2);
      } else {
        k1_lo = a.alpha0 / -a.alpha1;
        k1_hi = opt.k1_cap;
        if (!(k1_lo < k1_hi)) {
          last_fail = "k1 interval below the cap (alpha2 = 0 branch)";
          continue;
        }
      }
      const double k1 = 0.5 * (k1_lo + k1_hi);
      const double quad = a.alpha2 * k1 * k1 + a.alpha1 * k1 + a.alpha0;
      if (!(quad < 0.0)) {
        last_fail = "quadratic negativity at the midpoint k1";
        continue;
      }

      DesignResult r;
      r.p1 = p1;
      r.p2 = p2;
      r.k2 = in.sp.b * p1 / p2;
      r.k1 = k1;
      r.k1_lo = k1_lo;
      r.k1_hi = k1_hi;
      r.fns = f;
      r.alphas = a;
      r.gamma1_tilde = gamma1_tilde;
      r.feasibility_margin = feas.margin;
      return r;
    }
  }
  throw search_exhausted(
      "design_gains: (p1, p2) grid exhausted; last failing condition: " +
      last_fail);
}

VerifyReport verify_gain_selection(const DesignResult& r,
                                   const DesignInputs& in) {
  return report_at(r.p1, r.p2, r.k1, r.k2, in);
}

VerifyReport assess_gains(double k1, double k2, const DesignInputs& in) {
  if (!(k1 > 0.0) || !(k2 > 0.0)) {
    throw input_error("assess_gains: gains must be positive");
  }
  in.sp.validate_shape();
  in.search.validate();
  in.constants.validate();

  VerifyReport best;
  double best_worst = -std::numeric_limits<double>::infinity();
  for (const double p2 : p2_grid(in)) {
    const double p1 = k2 * p2 / in.sp.b;  // the design relation k2 = b*p1/p2
    VerifyReport rep = report_at(p1, p2, k1, k2, in);
    double worst = std::numeric_limits<double>::infinity();
    for (const CheckLine& l : rep.checks) worst = std::min(worst, l.slack);
    if (worst > best_worst) {
      best_worst = worst;
      best = std::move(rep);
    }
  }
  if (best.checks.empty()) {
    throw search_exhausted(
        "assess_gains: no admissible certificate parameter p2 found");
  }
  return best;
}

}  // namespace mgsta
