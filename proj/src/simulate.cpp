#include "mgsta/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgsta/errors.hpp"

namespace mgsta {

void DisturbanceConfig::validate(std::size_t n) const {
  if (amplitude.size() != n) {
    throw input_error("DisturbanceConfig: amplitude must have dimension " +
                      std::to_string(n));
  }
  if (!all_finite(amplitude) || !std::isfinite(omega) ||
      !std::isfinite(phase)) {
    throw input_error("DisturbanceConfig: values must be finite");
  }
}

Vec DisturbanceConfig::at(double t) const {
  return std::sin(omega * t + phase) * amplitude;
}

void Scenario::validate() const {
  sta.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw input_error("Scenario: dt must be positive and finite");
  }
  if (!(horizon >= dt) || !std::isfinite(horizon)) {
    throw input_error("Scenario: horizon must be finite and >= dt");
  }
  if (!(conv_eps > 0.0)) {
    throw input_error("Scenario: conv_eps must be positive");
  }
  if (conv_hold && !(*conv_hold >= 0.0)) {
    throw input_error("Scenario: conv_hold must be >= 0");
  }
  if (cert) cert->validate();
  if (kind == PlantKind::robot) {
    robot.validate();
    ref.validate();
    if (init.q.size() != 3 || init.qdot.size() != 3 ||
        !all_finite(init.q) || !all_finite(init.qdot)) {
      throw input_error("Scenario: robot initial state must be finite R^3");
    }
    disturbance.validate(3);
  } else {
    academic.validate();
    if (academic_x0.size() != 2 || !all_finite(academic_x0)) {
      throw input_error("Scenario: academic initial state must be finite R^2");
    }
  }
}

Vec euler_step(double t, const Vec& state,
               const std::function<Vec(double, const Vec&)>& deriv,
               double dt) {
  if (!(dt > 0.0)) {
    throw input_error("euler_step: dt must be positive");
  }
  if (!deriv) {
    throw input_error("euler_step: derivative evaluator must be set");
  }
  const Vec d = deriv(t, state);
  if (d.size() != state.size()) {
    throw input_error("euler_step: derivative dimension mismatch");
  }
  if (!all_finite(d)) {
    throw divergence_error(
        "euler_step: non-finite derivative at t = " + std::to_string(t), t);
  }
  Vec next = state + dt * d;
  if (!all_finite(next)) {
    throw divergence_error(
        "euler_step: non-finite state at t = " + std::to_string(t), t);
  }
  return next;
}

namespace {

Vec pack3(const Vec& a, const Vec& b, const Vec& c) {
  Vec y(a.size() + b.size() + c.size());
  std::size_t k = 0;
  for (double x : a) y[k++] = x;
  for (double x : b) y[k++] = x;
  for (double x : c) y[k++] = x;
  return y;
}

Vec slice(const Vec& y, std::size_t from, std::size_t len) {
  Vec out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = y[from + i];
  return out;
}

void finish_summary(const Trace& trace, const Scenario& sc, RunSummary& out) {
  out.t_conv = detect_convergence(trace, sc.conv_eps, sc.conv_hold);
  out.converged = out.t_conv.has_value();
  out.max_s_after_conv = 0.0;
  if (out.converged) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace.t[i] >= *out.t_conv) {
        out.max_s_after_conv = std::max(out.max_s_after_conv,
                                        trace.norm_s[i]);
      }
    }
  }
  out.max_u = 0.0;
  for (const Vec& u : trace.u) out.max_u = std::max(out.max_u, norm_inf(u));
}

RunResult run_robot(const Scenario& sc) {
  const RobotParams& p = sc.robot;
  const Reference& ref = sc.ref;
  const StaParams& sp = sc.sta;
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(sc.horizon / sc.dt));

  // Only needed when a certificate asks for V along the trace; building it
  // enforces the decomposition preconditions (beta == 1, constant qd_dot).
  std::optional<RobotPlant> rp;
  if (sc.cert) rp.emplace(robot_uncertain_plant(p, ref, sp));

  auto deriv = [&](double t, const Vec& y) {
    RobotState st{slice(y, 0, 3), slice(y, 3, 3)};
    const Vec s = sliding_state(st, ref, t);
    const Mat g0 =
        (p.kan * p.ren / p.ran) *
        (invert(p.Mn) * robot_matrices(st, p).R.transpose());
    const ControlOutput co = control_and_derivative(s, {slice(y, 6, 3)}, g0,
                                                    sp);
    const Vec qddot = robot_accel(st, co.u, sc.disturbance.at(t), p);
    return pack3(st.qdot, qddot, co.v_dot);
  };

  Trace trace;
  trace.n = 3;
  trace.t.reserve(steps + 1);
  RunSummary summary;

  Vec y = pack3(sc.init.q, sc.init.qdot, Vec(3));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * sc.dt;
    const RobotState st{slice(y, 0, 3), slice(y, 3, 3)};
    const Vec v = slice(y, 6, 3);
    const Vec s = sliding_state(st, ref, t);
    const Mat g0 = (p.kan * p.ren / p.ran) *
                   (invert(p.Mn) * robot_matrices(st, p).R.transpose());
    const Vec u = control_and_derivative(s, {v}, g0, sp).u;

    trace.t.push_back(t);
    trace.q.push_back(st.q);
    trace.qdot.push_back(st.qdot);
    trace.s.push_back(s);
    trace.v.push_back(v);
    trace.u.push_back(u);
    trace.norm_s.push_back(norm(s));
    if (rp) {
      const Vec ctx = robot_ctx(st, ref, t);
      trace.V.push_back(
          lyap_value(zeta_coords(t, ctx, v, rp->plant, sp), *sc.cert));
    }

    if (i == steps) break;
    try {
      y = euler_step(t, y, deriv, sc.dt);
    } catch (const divergence_error& e) {
      summary.diverged = true;
      summary.divergence_time = e.time();
      break;
    }
  }

  finish_summary(trace, sc, summary);
  RunResult out;
  out.trace = std::move(trace);
  out.summary = summary;
  return out;
}

RunResult run_academic(const Scenario& sc) {
  const StaParams& sp = sc.sta;
  const UncertainPlant plant = academic_plant(sc.academic);
  const Mat g0 = Mat::identity(2);
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(sc.horizon / sc.dt));

  auto deriv = [&](double t, const Vec& y) {
    const Vec x = slice(y, 0, 2);
    const Vec v = slice(y, 2, 2);
    const ControlOutput co = control_and_derivative(x, {v}, g0, sp);
    const PlantEval e = plant.at(t, x);
    const Vec xdot = (e.G0 + e.DeltaG * e.G0) * co.u;
    return pack3(xdot, co.v_dot, Vec(0));
  };

  Trace trace;
  trace.n = 2;
  trace.t.reserve(steps + 1);
  RunSummary summary;

  Vec y = pack3(sc.academic_x0, Vec(2), Vec(0));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * sc.dt;
    const Vec x = slice(y, 0, 2);
    const Vec v = slice(y, 2, 2);
    const Vec u = control_and_derivative(x, {v}, g0, sp).u;

    trace.t.push_back(t);
    trace.s.push_back(x);
    trace.v.push_back(v);
    trace.u.push_back(u);
    trace.norm_s.push_back(norm(x));
    if (sc.cert) {
      trace.V.push_back(
          lyap_value(zeta_coords(t, x, v, plant, sp), *sc.cert));
    }

    if (i == steps) break;
    try {
      y = euler_step(t, y, deriv, sc.dt);
    } catch (const divergence_error& e) {
      summary.diverged = true;
      summary.divergence_time = e.time();
      break;
    }
  }

  finish_summary(trace, sc, summary);
  RunResult out;
  out.trace = std::move(trace);
  out.summary = summary;
  return out;
}

}  // namespace

RunResult run(const Scenario& scenario) {
  scenario.validate();
  return scenario.kind == PlantKind::robot ? run_robot(scenario)
                                           : run_academic(scenario);
}

std::optional<double> detect_convergence(const Trace& trace, double eps,
                                         std::optional<double> hold) {
  if (!(eps > 0.0)) {
    throw input_error("detect_convergence: eps must be positive");
  }
  if (hold && !(*hold >= 0.0)) {
    throw input_error("detect_convergence: hold must be >= 0");
  }
  const std::size_t m = trace.size();
  if (m == 0) return {};
  if (trace.norm_s.size() != m) {
    throw input_error("detect_convergence: trace is missing ||s|| values");
  }

  // next_bad[i]: first index >= i where ||s|| exceeds eps (m when none).
  std::vector<std::size_t> next_bad(m + 1);
  next_bad[m] = m;
  for (std::size_t i = m; i-- > 0;) {
    next_bad[i] = (trace.norm_s[i] > eps) ? i : next_bad[i + 1];
  }

  const double t_end = trace.t.back();
  for (std::size_t i = 0; i < m; ++i) {
    if (next_bad[i] == m) return trace.t[i];  // clean to the end of the trace
    if (hold) {
      const double window_end = std::min(trace.t[i] + *hold, t_end);
      if (trace.t[next_bad[i]] > window_end) return trace.t[i];
    }
  }
  return {};
}

std::vector<MonitorSample> monitor_samples(const Trace& trace,
                                           const Scenario& scenario) {
  std::vector<MonitorSample> rows;
  rows.reserve(trace.size());
  if (scenario.kind == PlantKind::robot) {
    if (trace.q.size() != trace.size() || trace.qdot.size() != trace.size()) {
      throw input_error("monitor_samples: robot trace is missing q/qdot");
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const RobotState st{trace.q[i], trace.qdot[i]};
      rows.push_back(MonitorSample{trace.t[i],
                                   robot_ctx(st, scenario.ref, trace.t[i]),
                                   trace.s[i], trace.v[i]});
    }
  } else {
    // Traces read back from CSV are padded to the robot shape; slice the
    // academic plant's native two dimensions back out.
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const Vec x = trace.s[i].size() > 2 ? slice(trace.s[i], 0, 2)
                                          : trace.s[i];
      const Vec v = trace.v[i].size() > 2 ? slice(trace.v[i], 0, 2)
                                          : trace.v[i];
      rows.push_back(MonitorSample{trace.t[i], x, x, v});
    }
  }
  return rows;
}

UncertainPlant scenario_plant(const Scenario& scenario) {
  if (scenario.kind == PlantKind::robot) {
    return robot_uncertain_plant(scenario.robot, scenario.ref, scenario.sta)
        .plant;
  }
  return academic_plant(scenario.academic);
}

}  // namespace mgsta
