#include "mgsta/bounds.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mgsta/errors.hpp"

namespace mgsta {

namespace {

// Uniform double in [0, 1) from the top 53 bits of the engine output. The
// engine itself is bit-exact across platforms; this mapping keeps the whole
// sampling pipeline reproducible (stdlib distributions are not pinned).
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

// Isotropic unit vector via Box-Muller pairs.
Vec random_unit(std::mt19937_64& rng, std::size_t n) {
  Vec d(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = u01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    d[i] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < n) d[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  const double len = norm(d);
  if (len < 1e-12) {
    Vec e1(n);
    e1[0] = 1.0;
    return e1;
  }
  return (1.0 / len) * d;
}

double lam_max(const SymMat& s) { return eig_sym_extremes(s).second; }

/// Running extremum with the sample that attained it.
struct Extremum {
  double value = 0.0;
  SampleRef at;
  bool set = false;

  void consider_max(double cand, double t, const Vec& ctx) {
    if (!set || cand > value) {
      value = cand;
      at = SampleRef{t, ctx};
      set = true;
    }
  }
  void consider_min(double cand, double t, const Vec& ctx) {
    if (!set || cand < value) {
      value = cand;
      at = SampleRef{t, ctx};
      set = true;
    }
  }
};

std::string describe_sample(double t, const Vec& ctx) {
  std::string s = "t=" + std::to_string(t) + ", ctx=(";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(ctx[i]);
  }
  s += ")";
  return s;
}

/// One-pass accumulator over samples for all 26 constants.
struct Accumulator {
  const UncertainPlant& plant;
  const StaParams& sp;

  Extremum gm, gM, d1, d2, d3, g1, g2, g3, g4, g5;
  Extremum mu1, mu2, mu3, mu4;
  Extremum th[12];
  std::size_t count = 0;

  Accumulator(const UncertainPlant& p, const StaParams& s) : plant(p), sp(s) {}

  void sample(double t, const Vec& ctx) {
    const std::size_t n = plant.n;
    const PlantEval e = plant.at(t, ctx);
    if (e.G0.dim() != n || e.DeltaG.dim() != n || e.Delta1.dim() != n ||
        e.Delta2.dim() != n || e.Delta3.dim() != n || e.f2.size() != n ||
        e.x.size() != n) {
      throw input_error("estimate_all: plant evaluation dimension mismatch");
    }
    ++count;

    const Mat T = Mat::identity(n) + e.DeltaG;
    const Mat G = T * e.G0;

    const auto [sym_g_lo, sym_g_hi] = eig_sym_extremes(sym(G));
    const double gmin = 2.0 * sym_g_lo;
    if (!(gmin > 0.0)) {
      throw assumption_violation(
          "estimate_all: G + G^T is not positive definite (lambda_min = " +
              std::to_string(gmin) + ") at " + describe_sample(t, ctx),
          t, describe_sample(t, ctx));
    }
    gm.consider_min(gmin, t, ctx);
    gM.consider_max(2.0 * sym_g_hi, t, ctx);

    d1.consider_max(norm2(e.Delta1), t, ctx);
    d2.consider_max(norm2(e.Delta2), t, ctx);
    d3.consider_max(norm2(e.Delta3), t, ctx);

    g5.consider_max(lam_max(gram(e.DeltaG.transpose())), t, ctx);
    mu1.consider_max(2.0 * lam_max(sym(e.Delta1)), t, ctx);

    // Everything below involves the normalized Jacobian or A = Delta3/c,
    // both undefined at x = 0. The origin shell probes the ||x|| -> 0 limit
    // at nonzero radii, so a sample that lands exactly on x = 0 is skipped
    // for these terms.
    if (norm(e.x) < kOriginGuard) return;

    const Mat J = script_j(e.x, sp).mat();
    const double c = c_scalar(e.x, sp);
    const Mat A = (1.0 / c) * e.Delta3;

    const auto [jt_lo, jt_hi] = eig_sym_extremes(sym(J * T));
    const double g1cand = 2.0 * jt_lo;
    if (!(g1cand > 0.0)) {
      throw assumption_violation(
          "estimate_all: 2 Sym{script_j (I+DeltaG)} is not positive definite "
          "(lambda_min = " +
              std::to_string(g1cand) + ") at " + describe_sample(t, ctx),
          t, describe_sample(t, ctx));
    }
    g1.consider_min(g1cand, t, ctx);
    g2.consider_max(2.0 * jt_hi, t, ctx);

    g3.consider_max(lam_max(gram(J * G)), t, ctx);
    g4.consider_max(2.0 * lam_max(sym(e.DeltaG * (J * G))), t, ctx);

    mu2.consider_max(2.0 * lam_max(sym(A * G)), t, ctx);
    mu3.consider_max(2.0 * lam_max(sym(A * e.Delta1 + e.Delta2)), t, ctx);
    mu4.consider_max(2.0 * lam_max(sym(A * T)), t, ctx);

    const Mat d1t = e.Delta1.transpose();
    const Mat e1 = sp.b * (A * T) + d1t * J;
    const Mat e2 = e.Delta2.transpose() + d1t * A.transpose();
    const Mat ag = A * G;

    th[0].consider_max(2.0 * lam_max(sym(G.transpose() * (J * ag))), t, ctx);
    th[1].consider_max(lam_max(gram(ag)), t, ctx);
    th[2].consider_max(2.0 * lam_max(sym(e1 * (J * G))), t, ctx);
    th[3].consider_max(2.0 * lam_max(sym(e2 * (J * G))), t, ctx);
    th[4].consider_max(2.0 * lam_max(sym(e1 * ag)), t, ctx);
    th[5].consider_max(2.0 * lam_max(sym(e.DeltaG * ag)), t, ctx);
    th[6].consider_max(2.0 * lam_max(sym(e2 * ag)), t, ctx);
    th[7].consider_max(2.0 * lam_max(sym(e.DeltaG * e1.transpose())), t, ctx);
    th[8].consider_max(2.0 * lam_max(sym(e.DeltaG * e2.transpose())), t, ctx);
    th[9].consider_max(2.0 * lam_max(sym(e2 * e1.transpose())), t, ctx);
    th[10].consider_max(lam_max(gram(e2.transpose())), t, ctx);
    th[11].consider_max(lam_max(gram(e1.transpose())), t, ctx);
  }
};

/// Deterministic sample enumeration: tensor grid, origin shell, random tail.
template <typename F>
void for_each_sample(const UncertainPlant& plant, const SamplingDomain& dom,
                     F&& visit) {
  std::vector<double> times;
  if (dom.t1 > dom.t0) {
    times.reserve(dom.time_points);
    for (std::size_t k = 0; k < dom.time_points; ++k) {
      times.push_back(dom.t0 + (dom.t1 - dom.t0) * static_cast<double>(k) /
                                   static_cast<double>(dom.time_points - 1));
    }
  } else {
    times.push_back(dom.t0);
  }

  const std::size_t d = plant.ctx_dim;

  // Shell directions: coordinate axes, sign corners, seeded random.
  std::vector<Vec> dirs;
  std::mt19937_64 rng(dom.seed);
  if (dom.shell_radii > 0) {
    if (!plant.ctx_for_state) {
      throw input_error(
          "estimate_all: plant provides no ctx_for_state section but the "
          "domain requests origin-shell samples");
    }
    const std::size_t n = plant.n;
    for (std::size_t i = 0; i < n; ++i) {
      Vec e(n);
      e[i] = 1.0;
      dirs.push_back(e);
      dirs.push_back(-e);
    }
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Vec corner(n);
      for (std::size_t i = 0; i < n; ++i) {
        corner[i] = (mask >> i) & 1 ? inv : -inv;
      }
      dirs.push_back(corner);
    }
    for (std::size_t k = 0; k < dom.shell_random_dirs; ++k) {
      dirs.push_back(random_unit(rng, n));
    }
  }

  for (double t : times) {
    // Tensor grid over the context box.
    std::vector<std::size_t> idx(d, 0);
    Vec ctx(d);
    while (true) {
      for (std::size_t i = 0; i < d; ++i) {
        ctx[i] = dom.ctx_lo[i] +
                 (dom.ctx_hi[i] - dom.ctx_lo[i]) * static_cast<double>(idx[i]) /
                     static_cast<double>(dom.grid_points - 1);
      }
      visit(t, ctx);
      std::size_t axis = 0;
      while (axis < d && ++idx[axis] == dom.grid_points) {
        idx[axis] = 0;
        ++axis;
      }
      if (axis == d) break;
    }

    // Logarithmic origin shell in controlled-state space.
    for (std::size_t k = 0; k < dom.shell_radii; ++k) {
      const double frac =
          dom.shell_radii == 1
              ? 0.0
              : static_cast<double>(k) / static_cast<double>(dom.shell_radii - 1);
      const double r = dom.shell_r_min *
                       std::pow(dom.shell_r_max / dom.shell_r_min, frac);
      for (const Vec& dir : dirs) {
        visit(t, plant.ctx_for_state(t, r * dir));
      }
    }
  }

  // Seeded uniform refinement inside the box.
  for (std::size_t k = 0; k < dom.random_points; ++k) {
    const double t = dom.t1 > dom.t0 ? uniform_in(rng, dom.t0, dom.t1) : dom.t0;
    Vec ctx(d);
    for (std::size_t i = 0; i < d; ++i) {
      ctx[i] = uniform_in(rng, dom.ctx_lo[i], dom.ctx_hi[i]);
    }
    visit(t, ctx);
  }
}

double scale_upper(double v, double safety) {
  return v >= 0.0 ? v * safety : v / safety;
}

double scale_lower(double v, double safety) {
  return v >= 0.0 ? v / safety : v * safety;
}

}  // namespace

void SamplingDomain::validate(std::size_t ctx_dim) const {
  if (ctx_lo.size() != ctx_dim || ctx_hi.size() != ctx_dim) {
    throw input_error(
        "SamplingDomain: box dimension does not match the plant context "
        "dimension");
  }
  for (std::size_t i = 0; i < ctx_dim; ++i) {
    if (!(ctx_lo[i] < ctx_hi[i]) || !std::isfinite(ctx_lo[i]) ||
        !std::isfinite(ctx_hi[i])) {
      throw input_error("SamplingDomain: axis " + std::to_string(i + 1) +
                        " requires finite min < max");
    }
  }
  if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) {
    throw input_error("SamplingDomain: time interval requires t0 <= t1");
  }
  if (t1 > t0 && time_points < 2) {
    throw input_error(
        "SamplingDomain: a non-degenerate time interval needs >= 2 points");
  }
  if (grid_points < 2) {
    throw input_error("SamplingDomain: grid_points must be >= 2");
  }
  if (shell_radii > 0) {
    if (!(shell_r_min > 0.0) || !(shell_r_max >= shell_r_min)) {
      throw input_error(
          "SamplingDomain: shell radii require 0 < shell_r_min <= "
          "shell_r_max");
    }
  }
}

const std::array<std::pair<const char*, double BoundConstants::*>, 26>&
BoundConstants::fields() {
  static const std::array<std::pair<const char*, double BoundConstants::*>, 26>
      table = {{
          {"g_m", &BoundConstants::g_m},
          {"g_M", &BoundConstants::g_M},
          {"delta1", &BoundConstants::delta1},
          {"delta2", &BoundConstants::delta2},
          {"delta3", &BoundConstants::delta3},
          {"gamma1", &BoundConstants::gamma1},
          {"gamma2", &BoundConstants::gamma2},
          {"gamma3", &BoundConstants::gamma3},
          {"gamma4", &BoundConstants::gamma4},
          {"gamma5", &BoundConstants::gamma5},
          {"mu1", &BoundConstants::mu1},
          {"mu2", &BoundConstants::mu2},
          {"mu3", &BoundConstants::mu3},
          {"mu4", &BoundConstants::mu4},
          {"theta1", &BoundConstants::theta1},
          {"theta2", &BoundConstants::theta2},
          {"theta3", &BoundConstants::theta3},
          {"theta4", &BoundConstants::theta4},
          {"theta5", &BoundConstants::theta5},
          {"theta6", &BoundConstants::theta6},
          {"theta7", &BoundConstants::theta7},
          {"theta8", &BoundConstants::theta8},
          {"theta9", &BoundConstants::theta9},
          {"theta10", &BoundConstants::theta10},
          {"theta11", &BoundConstants::theta11},
          {"theta12", &BoundConstants::theta12},
      }};
  return table;
}

void BoundConstants::validate() const {
  for (const auto& [name, member] : fields()) {
    if (!std::isfinite(this->*member)) {
      throw input_error(std::string("BoundConstants: ") + name +
                        " is not finite");
    }
  }
  if (!(g_m > 0.0)) throw input_error("BoundConstants: g_m must be > 0");
  if (!(g_M >= g_m)) throw input_error("BoundConstants: g_M must be >= g_m");
  if (delta1 < 0.0 || delta2 < 0.0 || delta3 < 0.0) {
    throw input_error("BoundConstants: delta1..3 must be >= 0");
  }
  if (!(gamma1 > 0.0)) throw input_error("BoundConstants: gamma1 must be > 0");
  if (!(gamma2 >= gamma1)) {
    throw input_error("BoundConstants: gamma2 must be >= gamma1");
  }
  if (gamma3 < 0.0 || gamma4 < 0.0 || gamma5 < 0.0) {
    throw input_error("BoundConstants: gamma3..5 must be >= 0");
  }
}

BoundEstimate estimate_all(const UncertainPlant& plant,
                           const SamplingDomain& dom, const StaParams& sp,
                           double safety) {
  sp.validate_shape();
  dom.validate(plant.ctx_dim);
  if (!(safety >= 1.0) || !std::isfinite(safety)) {
    throw input_error("estimate_all: safety factor must be >= 1");
  }
  if (plant.n == 0 || !plant.at) {
    throw input_error("estimate_all: plant has no evaluation callback");
  }

  Accumulator acc(plant, sp);
  for_each_sample(plant, dom,
                  [&acc](double t, const Vec& ctx) { acc.sample(t, ctx); });

  if (!acc.g1.set) {
    throw input_error(
        "estimate_all: no sample had x != 0; the normalized-Jacobian bounds "
        "are undefined (add shell samples or move the box off the origin)");
  }

  BoundEstimate out;
  out.samples = acc.count;

  auto put = [&out](const char* name, const Extremum& e) {
    out.witness[name] = e.at;
  };

  BoundConstants& raw = out.raw;
  raw.g_m = acc.gm.value;
  raw.g_M = acc.gM.value;
  raw.delta1 = acc.d1.value;
  raw.delta2 = acc.d2.value;
  raw.delta3 = acc.d3.value;
  raw.gamma1 = acc.g1.value;
  raw.gamma2 = acc.g2.value;
  raw.gamma3 = acc.g3.value;
  raw.gamma4 = acc.g4.value;
  raw.gamma5 = acc.g5.value;
  raw.mu1 = acc.mu1.value;
  raw.mu2 = acc.mu2.value;
  raw.mu3 = acc.mu3.value;
  raw.mu4 = acc.mu4.value;
  double BoundConstants::* theta_members[12] = {
      &BoundConstants::theta1, &BoundConstants::theta2,
      &BoundConstants::theta3, &BoundConstants::theta4,
      &BoundConstants::theta5, &BoundConstants::theta6,
      &BoundConstants::theta7, &BoundConstants::theta8,
      &BoundConstants::theta9, &BoundConstants::theta10,
      &BoundConstants::theta11, &BoundConstants::theta12};
  for (int i = 0; i < 12; ++i) raw.*theta_members[i] = acc.th[i].value;

  put("g_m", acc.gm);
  put("g_M", acc.gM);
  put("delta1", acc.d1);
  put("delta2", acc.d2);
  put("delta3", acc.d3);
  put("gamma1", acc.g1);
  put("gamma2", acc.g2);
  put("gamma3", acc.g3);
  put("gamma4", acc.g4);
  put("gamma5", acc.g5);
  put("mu1", acc.mu1);
  put("mu2", acc.mu2);
  put("mu3", acc.mu3);
  put("mu4", acc.mu4);
  for (int i = 0; i < 12; ++i) {
    put(BoundConstants::fields()[14 + i].first, acc.th[i]);
  }

  BoundConstants& c = out.constants;
  c = raw;
  c.g_m = scale_lower(raw.g_m, safety);
  c.gamma1 = scale_lower(raw.gamma1, safety);
  c.g_M = scale_upper(raw.g_M, safety);
  c.delta1 = scale_upper(raw.delta1, safety);
  c.delta2 = scale_upper(raw.delta2, safety);
  c.delta3 = scale_upper(raw.delta3, safety);
  c.gamma2 = scale_upper(raw.gamma2, safety);
  c.gamma3 = scale_upper(raw.gamma3, safety);
  c.gamma4 = scale_upper(raw.gamma4, safety);
  c.gamma5 = scale_upper(raw.gamma5, safety);
  c.mu1 = scale_upper(raw.mu1, safety);
  c.mu2 = scale_upper(raw.mu2, safety);
  c.mu3 = scale_upper(raw.mu3, safety);
  c.mu4 = scale_upper(raw.mu4, safety);
  for (int i = 0; i < 12; ++i) {
    c.*theta_members[i] = scale_upper(raw.*theta_members[i], safety);
  }

  c.validate();
  return out;
}

AssumptionBounds estimate_assumption(const UncertainPlant& plant,
                                     const SamplingDomain& dom,
                                     const StaParams& sp, double safety) {
  const BoundConstants c = estimate_all(plant, dom, sp, safety).constants;
  return AssumptionBounds{c.g_m,    c.g_M,    c.delta1, c.delta2,
                          c.delta3, c.gamma1, c.gamma2};
}

GammaBounds estimate_gammas(const UncertainPlant& plant,
                            const SamplingDomain& dom, const StaParams& sp,
                            double safety) {
  const BoundConstants c = estimate_all(plant, dom, sp, safety).constants;
  return GammaBounds{c.gamma3, c.gamma4, c.gamma5};
}

MuThetaBounds estimate_mus_thetas(const UncertainPlant& plant,
                                  const SamplingDomain& dom,
                                  const StaParams& sp, double safety) {
  const BoundConstants c = estimate_all(plant, dom, sp, safety).constants;
  return MuThetaBounds{c.mu1,    c.mu2,    c.mu3,    c.mu4,
                       c.theta1, c.theta2, c.theta3, c.theta4,
                       c.theta5, c.theta6, c.theta7, c.theta8,
                       c.theta9, c.theta10, c.theta11, c.theta12};
}

}  // namespace mgsta
