// Command-line front end: estimate bound constants, test feasibility,
// design gains, simulate the closed loop, verify traces against a
// certificate, and sweep one config key over a grid.
//
// Exit codes: 0 success, 1 verification failed, 2 input error,
// 3 assumption violation, 4 infeasible, 5 search exhaustion,
// 6 non-convergence, 7 divergence.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgsta/bounds.hpp"
#include "mgsta/errors.hpp"
#include "mgsta/gain_design.hpp"
#include "mgsta/io.hpp"
#include "mgsta/lyapunov.hpp"
#include "mgsta/simulate.hpp"

namespace {

using namespace mgsta;

struct GlobalFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> safety;
  bool quiet = false;
};

void apply_overrides(const GlobalFlags& flags, io::LoadedConfig& cfg) {
  if (flags.seed) cfg.domain.seed = *flags.seed;
  if (flags.safety) {
    if (!(*flags.safety >= 1.0)) {
      throw input_error("--safety must be >= 1");
    }
    cfg.safety = *flags.safety;
  }
  if (flags.quiet) cfg.quiet = true;
}

void say(const io::LoadedConfig& cfg, const std::string& line) {
  if (!cfg.quiet) std::printf("%s\n", line.c_str());
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int cmd_estimate_bounds(const GlobalFlags& flags) {
  io::LoadedConfig cfg = io::load_config(flags.config);
  apply_overrides(flags, cfg);
  const UncertainPlant plant = scenario_plant(cfg.scenario);
  const BoundEstimate est =
      estimate_all(plant, cfg.domain, cfg.scenario.sta, cfg.safety);
  io::write_constants(flags.out, est.constants);
  say(cfg, "estimated 26 constants from " + std::to_string(est.samples) +
               " samples (safety " + num(cfg.safety) + ") -> " + flags.out);
  if (!cfg.quiet) {
    std::printf("%s\n", io::constants_to_json(est.constants).dump(2).c_str());
  }
  return 0;
}

int cmd_check_feasibility(const std::string& constants_path, bool quiet) {
  const BoundConstants c = io::read_constants(constants_path);
  const FeasibilityResult f = check_feasibility(c);
  if (!quiet || !f.feasible) {
    std::printf("existence margin gamma1*g_m - gamma4 - 2*sqrt(gamma3*gamma5)"
                " = %s -> %s\n",
                num(f.margin).c_str(), f.feasible ? "feasible" : "infeasible");
  }
  return f.feasible ? 0 : 4;
}

void print_report(const VerifyReport& rep) {
  for (const CheckLine& line : rep.checks) {
    std::printf("  [%s] %s (slack %s)\n", line.pass ? "PASS" : "FAIL",
                line.name.c_str(), num(line.slack).c_str());
  }
  std::printf("verification: %s\n", rep.all_pass ? "all pass" : "FAILED");
}

int cmd_design_gains(const GlobalFlags& flags,
                     const std::string& constants_path) {
  io::LoadedConfig cfg = flags.config.empty()
                             ? io::parse_config(nlohmann::json::object(),
                                                "defaults")
                             : io::load_config(flags.config);
  apply_overrides(flags, cfg);
  DesignInputs in{io::read_constants(constants_path), cfg.scenario.sta,
                  cfg.search};
  const DesignResult r = design_gains(in);
  io::write_design(flags.out, r);
  say(cfg, "designed gains k1 = " + num(r.k1) + ", k2 = " + num(r.k2) +
               " at (p1, p2) = (" + num(r.p1) + ", " + num(r.p2) + ") -> " +
               flags.out);
  if (!cfg.quiet) print_report(verify_gain_selection(r, in));
  return 0;
}

int cmd_simulate(const GlobalFlags& flags) {
  io::LoadedConfig cfg = io::load_config(flags.config);
  apply_overrides(flags, cfg);
  const RunResult res = run(cfg.scenario);
  io::write_trace_csv(flags.out, res.trace);
  const std::string summary_path =
      std::filesystem::path(flags.out).replace_extension(".summary.json")
          .string();
  io::atomic_write(summary_path,
                   io::summary_to_json(res.summary).dump(2) + "\n");
  say(cfg, "trace (" + std::to_string(res.trace.size()) + " rows) -> " +
               flags.out + ", summary -> " + summary_path);
  if (!cfg.quiet) {
    std::printf("%s\n", io::summary_to_json(res.summary).dump(2).c_str());
  }
  if (res.summary.diverged) return 7;
  return res.summary.converged ? 0 : 6;
}

int cmd_verify(const GlobalFlags& flags, const std::string& trace_path) {
  io::LoadedConfig cfg = io::load_config(flags.config);
  apply_overrides(flags, cfg);
  if (!cfg.scenario.cert) {
    throw input_error(
        "verify: the config must provide scenario.certificate with p1, p2 "
        "satisfying p1*p2 > 1");
  }
  const Trace trace = io::read_trace_csv(trace_path);
  const std::vector<MonitorSample> rows = monitor_samples(trace,
                                                          cfg.scenario);
  const UncertainPlant plant = scenario_plant(cfg.scenario);
  const std::optional<double> t_conv =
      detect_convergence(trace, cfg.scenario.conv_eps, cfg.scenario.conv_hold);
  const MonitorReport rep = monitor_trajectory(
      rows, plant, cfg.scenario.sta, *cfg.scenario.cert, t_conv);

  const bool vdot_ok =
      rep.vdot_checked == 0 || rep.vdot_negative_fraction >= 0.99;
  if (!cfg.quiet) {
    std::printf("rows: %zu (pre-convergence %zu)\n", rep.samples,
                rep.pre_convergence);
    std::printf("  [%s] Q positive definite at all %zu checked rows "
                "(min lambda_min %s)\n",
                rep.q_pd_everywhere ? "PASS" : "FAIL", rep.q_checked,
                num(rep.min_q_lambda_min).c_str());
    std::printf("  [%s] V decreasing at %zu/%zu pre-convergence rows "
                "(%.2f%%, need >= 99%%)\n",
                vdot_ok ? "PASS" : "FAIL", rep.vdot_negative,
                rep.vdot_checked, 100.0 * rep.vdot_negative_fraction);
    std::printf("  max V %s, post-convergence residual ||z|| %s\n",
                num(rep.max_v).c_str(),
                num(rep.max_post_conv_residual).c_str());
  }
  return (rep.q_pd_everywhere && vdot_ok) ? 0 : 1;
}

struct SweepRow {
  double value = 0.0;
  bool assumption_ok = false;
  bool feasible = false;
  double margin = 0.0;
  double g_m = 0.0, gamma1 = 0.0, gamma3 = 0.0, gamma4 = 0.0, gamma5 = 0.0;
  std::string note;
};

int cmd_sweep(const GlobalFlags& flags) {
  io::LoadedConfig cfg = io::load_config(flags.config);
  apply_overrides(flags, cfg);
  if (!cfg.sweep) {
    throw input_error("sweep: the config must contain a 'sweep' section");
  }
  const io::SweepSpec& spec = *cfg.sweep;
  std::string pointer = "/" + spec.key;
  for (char& ch : pointer) {
    if (ch == '.') ch = '/';
  }

  auto one = [&](double value) -> SweepRow {
    nlohmann::json doc = cfg.raw;
    doc[nlohmann::json::json_pointer(pointer)] = value;
    io::LoadedConfig sub = io::parse_config(
        doc, "sweep " + spec.key + "=" + num(value));
    apply_overrides(flags, sub);
    SweepRow row;
    row.value = value;
    try {
      const BoundEstimate est = estimate_all(scenario_plant(sub.scenario),
                                             sub.domain, sub.scenario.sta,
                                             sub.safety);
      row.assumption_ok = true;
      const FeasibilityResult f = check_feasibility(est.constants);
      row.feasible = f.feasible;
      row.margin = f.margin;
      row.g_m = est.constants.g_m;
      row.gamma1 = est.constants.gamma1;
      row.gamma3 = est.constants.gamma3;
      row.gamma4 = est.constants.gamma4;
      row.gamma5 = est.constants.gamma5;
    } catch (const assumption_violation& e) {
      row.note = e.what();
      const double nan = std::nan("");
      row.margin = row.g_m = row.gamma1 = nan;
      row.gamma3 = row.gamma4 = row.gamma5 = nan;
    }
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(spec.values.size());
  for (double value : spec.values) {
    futures.push_back(std::async(std::launch::async, one, value));
  }

  std::string csv =
      "value,assumption_ok,feasible,margin,g_m,gamma1,gamma3,gamma4,gamma5\n";
  std::optional<double> best_feasible;
  for (auto& fut : futures) {
    const SweepRow row = fut.get();
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  row.value, row.assumption_ok ? 1 : 0, row.feasible ? 1 : 0,
                  row.margin, row.g_m, row.gamma1, row.gamma3, row.gamma4,
                  row.gamma5);
    csv += buf;
    if (row.feasible) {
      best_feasible = best_feasible ? std::max(*best_feasible, row.value)
                                    : row.value;
    }
  }
  io::atomic_write(flags.out, csv);
  say(cfg, "swept " + spec.key + " over " +
               std::to_string(spec.values.size()) + " values -> " + flags.out);
  if (best_feasible) {
    say(cfg, "largest feasible " + spec.key + " = " + num(*best_feasible));
  } else {
    say(cfg, "no feasible point on the grid");
  }
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const assumption_violation& e) {
    std::fprintf(stderr, "assumption violation: %s\n  witness: t = %g, %s\n",
                 e.what(), e.time(), e.witness().c_str());
    return 3;
  } catch (const infeasible_error& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 4;
  } catch (const search_exhausted& e) {
    std::fprintf(stderr, "search exhausted: %s\n", e.what());
    return 5;
  } catch (const divergence_error& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return 7;
  } catch (const input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const singular_matrix_error& e) {
    std::fprintf(stderr, "input error (singular matrix): %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Robust-control toolkit: bound estimation, constant-gain design, "
      "Lyapunov verification, and closed-loop simulation"};
  app.require_subcommand(1);

  GlobalFlags flags;
  std::string constants_path;
  std::string trace_path;

  auto add_common = [&](CLI::App* cmd, bool need_config, bool need_out) {
    auto* copt = cmd->add_option("--config", flags.config,
                                 "JSON config file");
    if (need_config) copt->required();
    auto* oopt = cmd->add_option("--out", flags.out, "output file");
    if (need_out) oopt->required();
    cmd->add_option("--seed", flags.seed, "override domain.seed");
    cmd->add_option("--safety", flags.safety,
                    "override the bound-estimation safety factor (>= 1)");
    cmd->add_flag("--quiet", flags.quiet, "suppress informational output");
  };

  CLI::App* est = app.add_subcommand(
      "estimate-bounds", "sample the plant and write the bound constants");
  add_common(est, true, true);

  CLI::App* feas = app.add_subcommand(
      "check-feasibility", "existence test on a constants file");
  feas->add_option("constants", constants_path, "constants JSON file")
      ->required();
  feas->add_flag("--quiet", flags.quiet, "suppress informational output");

  CLI::App* design = app.add_subcommand(
      "design-gains", "run the constant-gain synthesis on a constants file");
  design->add_option("constants", constants_path, "constants JSON file")
      ->required();
  add_common(design, false, true);

  CLI::App* sim = app.add_subcommand(
      "simulate", "run the closed loop and write the trace CSV");
  add_common(sim, true, true);

  CLI::App* verify = app.add_subcommand(
      "verify", "monitor a trace CSV against the config's certificate");
  verify->add_option("trace", trace_path, "trace CSV file")->required();
  add_common(verify, true, false);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "vary one config key over a grid and write a summary CSV");
  add_common(sweep, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (est->parsed()) return guarded([&] { return cmd_estimate_bounds(flags); });
  if (feas->parsed()) {
    return guarded(
        [&] { return cmd_check_feasibility(constants_path, flags.quiet); });
  }
  if (design->parsed()) {
    return guarded([&] { return cmd_design_gains(flags, constants_path); });
  }
  if (sim->parsed()) return guarded([&] { return cmd_simulate(flags); });
  if (verify->parsed()) {
    return guarded([&] { return cmd_verify(flags, trace_path); });
  }
  if (sweep->parsed()) return guarded([&] { return cmd_sweep(flags); });
  return 2;
}
