/**
 * @file simulate.hpp
 * @brief Fixed-step closed-loop simulation of the controllers on the bundled
 *        plants, with trace recording and convergence detection.
 *
 * The integrator is explicit Euler on purpose: the integral branch of the
 * controller has a bounded discontinuity at the origin for p = 1/2, which
 * defeats the order of smooth higher-order schemes, and the reference
 * experiments use Euler with dt = 1e-3.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mgsta/lyapunov.hpp"
#include "mgsta/matrix.hpp"
#include "mgsta/plants.hpp"
#include "mgsta/sta.hpp"

namespace mgsta {

enum class PlantKind { robot, academic };

/// Optional per-channel sinusoidal force disturbance w_i(t) =
/// amplitude_i * sin(omega*t + phase). Default amplitude is zero.
struct DisturbanceConfig {
  Vec amplitude{0.0, 0.0, 0.0};
  double omega = 0.0;
  double phase = 0.0;

  void validate(std::size_t n) const;
  Vec at(double t) const;
};

/// Full description of one closed-loop run. The defaults reproduce the
/// flagship tracking scenario: the omnidirectional robot following
/// q_d(t) = (0.5t, 0.5t, pi/4) with k1 = 42, k2 = 13, alpha = beta = 1,
/// b = 3, p = 0.4, Theta = 2I and dt = 1e-3 over 10 s.
struct Scenario {
  PlantKind kind = PlantKind::robot;
  RobotParams robot;
  Reference ref = linear_reference(Vec{0.5, 0.5, 0.0},
                                   Vec{0.0, 0.0, 0.7853981633974483},
                                   2.0 * Mat::identity(3));
  AcademicParams academic;
  StaParams sta{1.0, 1.0, 3.0, 0.4, 42.0, 13.0};
  RobotState init;                 ///< robot initial state (default rest at 0)
  Vec academic_x0{1.0, -1.0};      ///< academic plant initial state
  double dt = 1e-3;                ///< step, seconds
  double horizon = 10.0;           ///< total simulated time, seconds
  DisturbanceConfig disturbance;   ///< robot force disturbance w(t)
  std::optional<LyapCert> cert;    ///< when set, the trace records V
  double conv_eps = 1e-2;          ///< convergence ball radius on ||s||
  std::optional<double> conv_hold; ///< hold window; none = rest of horizon

  void validate() const;
};

/// Uniform-grid record of one run. q/qdot are empty for the academic plant
/// (it has no mechanical coordinates); s, v, u use the plant's native
/// dimension n. V is empty unless a certificate was supplied.
struct Trace {
  std::size_t n = 0;  ///< controller dimension (3 robot, 2 academic)
  std::vector<double> t;
  std::vector<Vec> q;
  std::vector<Vec> qdot;
  std::vector<Vec> s;
  std::vector<Vec> v;
  std::vector<Vec> u;
  std::vector<double> norm_s;
  std::vector<double> V;

  std::size_t size() const { return t.size(); }
  bool has_lyapunov() const { return !V.empty(); }
};

struct RunSummary {
  bool converged = false;
  std::optional<double> t_conv;
  double max_s_after_conv = 0.0;  ///< max ||s|| over [t_conv, horizon]
  double max_u = 0.0;             ///< max ||u||_inf over the whole run
  bool diverged = false;
  std::optional<double> divergence_time;
};

struct RunResult {
  Trace trace;
  RunSummary summary;
};

/// One explicit Euler step y + dt*f(t, y). Throws divergence_error with the
/// witness time when the derivative or the result is non-finite.
Vec euler_step(double t, const Vec& state,
               const std::function<Vec(double, const Vec&)>& deriv, double dt);

/// Runs the closed loop described by the scenario. On divergence the partial
/// trace up to the last finite state is returned and the summary carries the
/// divergence flag and time; no exception escapes for that case.
RunResult run(const Scenario& scenario);

/// Earliest grid time t such that ||s|| <= eps holds on [t, t + hold]
/// (clipped at the end of the trace). hold = none means the remainder of the
/// horizon. Returns none when no such time exists.
std::optional<double> detect_convergence(const Trace& trace, double eps,
                                         std::optional<double> hold = {});

/// Re-derives the per-row monitor inputs (context, sliding state, integral
/// state) from a trace, for feeding monitor_trajectory.
std::vector<MonitorSample> monitor_samples(const Trace& trace,
                                           const Scenario& scenario);

/// The uncertain-plant view matching the scenario (used by bound estimation
/// and trace verification). For the robot this is
/// robot_uncertain_plant(robot, ref, sta).
UncertainPlant scenario_plant(const Scenario& scenario);

}  // namespace mgsta
