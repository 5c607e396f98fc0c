#include "mgsta/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "mgsta/errors.hpp"

namespace mgsta::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& where,
                       const std::string& msg) {
  throw input_error(origin + ": " + where + ": " + msg);
}

/// Wraps one JSON object, tracking which keys were consumed so that
/// leftovers can be rejected with their path.
class Section {
 public:
  Section(const json& j, std::string origin, std::string path)
      : origin_(std::move(origin)), path_(std::move(path)) {
    if (!j.is_object()) fail(origin_, path_, "must be a JSON object");
    rest_ = j;
  }

  bool has(const char* key) const { return rest_.contains(key); }

  json take(const char* key) {
    json v = rest_.at(key);
    rest_.erase(key);
    return v;
  }

  double num(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json v = take(key);
    if (!v.is_number()) fail(origin_, path_ + "." + key, "must be a number");
    return v.get<double>();
  }

  std::size_t count(const char* key, std::size_t fallback) {
    return static_cast<std::size_t>(u64(key, fallback));
  }

  // Accepts both unsigned values (what the text parser produces) and
  // non-negative signed integers (what programmatic construction produces).
  std::uint64_t u64(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json v = take(key);
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(origin_, path_ + "." + key, "must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool flag(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json v = take(key);
    if (!v.is_boolean()) fail(origin_, path_ + "." + key, "must be a boolean");
    return v.get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json v = take(key);
    if (!v.is_string()) fail(origin_, path_ + "." + key, "must be a string");
    return v.get<std::string>();
  }

  Vec vec(const char* key, const Vec& fallback, std::size_t n) {
    if (!has(key)) return fallback;
    const json v = take(key);
    if (!v.is_array() || v.size() != n) {
      fail(origin_, path_ + "." + key,
           "must be an array of " + std::to_string(n) + " numbers");
    }
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_number()) {
        fail(origin_, path_ + "." + key, "entries must be numbers");
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }

  /// 3x3 matrix given as a scalar (lambda*I), a 3-array (diagonal), or a
  /// full 3x3 nested array.
  Mat mat3(const char* key, const Mat& fallback) {
    if (!has(key)) return fallback;
    const json v = take(key);
    const std::string where = path_ + "." + key;
    if (v.is_number()) return v.get<double>() * Mat::identity(3);
    if (!v.is_array() || v.empty()) {
      fail(origin_, where, "must be a number, a 3-array, or a 3x3 array");
    }
    if (v[0].is_number()) {
      if (v.size() != 3) fail(origin_, where, "diagonal form needs 3 entries");
      Vec d(3);
      for (std::size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number()) fail(origin_, where, "entries must be numbers");
        d[i] = v[i].get<double>();
      }
      return Mat::diag(d);
    }
    if (v.size() != 3) fail(origin_, where, "full form needs 3 rows");
    Mat m(3);
    for (std::size_t i = 0; i < 3; ++i) {
      if (!v[i].is_array() || v[i].size() != 3) {
        fail(origin_, where, "full form needs 3 rows of 3 numbers");
      }
      for (std::size_t j = 0; j < 3; ++j) {
        if (!v[i][j].is_number()) {
          fail(origin_, where, "entries must be numbers");
        }
        m(i, j) = v[i][j].get<double>();
      }
    }
    return m;
  }

  Section subsection(const char* key) {
    return Section(take(key), origin_, path_ + "." + key);
  }

  /// Rejects any key that was never consumed.
  void finish() const {
    for (auto it = rest_.begin(); it != rest_.end(); ++it) {
      fail(origin_, path_, "unknown key '" + it.key() + "'");
    }
  }

 private:
  json rest_;
  std::string origin_;
  std::string path_;
};

void parse_plant(Section sec, const std::string& origin, Scenario& sc) {
  const std::string kind = sec.text("kind", "robot");
  if (kind == "robot") {
    sc.kind = PlantKind::robot;
    RobotParams& p = sc.robot;
    p.m1 = sec.num("m1", p.m1);
    p.m2 = sec.num("m2", p.m2);
    p.J1 = sec.num("J1", p.J1);
    p.J2 = sec.num("J2", p.J2);
    p.J3 = sec.num("J3", p.J3);
    p.Jm = sec.num("Jm", p.Jm);
    p.L = sec.num("L", p.L);
    p.l1 = sec.num("l1", p.l1);
    p.l2 = sec.num("l2", p.l2);
    p.r = sec.num("r", p.r);
    p.ka = sec.num("ka", p.ka);
    p.ra = sec.num("ra", p.ra);
    p.re = sec.num("re", p.re);
    p.fv_diag = sec.vec("fv_diag", p.fv_diag, 3);
    p.fd_diag = sec.vec("fd_diag", p.fd_diag, 3);
    p.Mn = sec.mat3("Mn", p.Mn);
    p.kan = sec.num("kan", p.kan);
    p.ran = sec.num("ran", p.ran);
    p.ren = sec.num("ren", p.ren);
  } else if (kind == "academic") {
    sc.kind = PlantKind::academic;
    AcademicParams& p = sc.academic;
    p.g_bar = sec.num("g_bar", p.g_bar);
    p.omega = sec.num("omega", p.omega);
    p.phase = sec.num("phase", p.phase);
  } else {
    fail(origin, "plant.kind", "must be 'robot' or 'academic'");
  }
  sec.finish();
}

void parse_sta(Section sec, StaParams& sp) {
  sp.alpha = sec.num("alpha", sp.alpha);
  sp.beta = sec.num("beta", sp.beta);
  sp.b = sec.num("b", sp.b);
  sp.p = sec.num("p", sp.p);
  sp.k1 = sec.num("k1", sp.k1);
  sp.k2 = sec.num("k2", sp.k2);
  sec.finish();
}

void parse_scenario(Section sec, const std::string& origin, Scenario& sc) {
  sc.dt = sec.num("dt", sc.dt);
  sc.horizon = sec.num("horizon", sc.horizon);
  sc.init.q = sec.vec("init_q", sc.init.q, 3);
  sc.init.qdot = sec.vec("init_qdot", sc.init.qdot, 3);
  sc.academic_x0 = sec.vec("x0", sc.academic_x0, 2);
  sc.conv_eps = sec.num("conv_eps", sc.conv_eps);
  if (sec.has("conv_hold")) sc.conv_hold = sec.num("conv_hold", 0.0);
  if (sec.has("reference")) {
    Section ref = sec.subsection("reference");
    const Vec rate = ref.vec("rate", Vec{0.5, 0.5, 0.0}, 3);
    const Vec offset =
        ref.vec("offset", Vec{0.0, 0.0, std::numbers::pi / 4.0}, 3);
    const Mat theta = ref.mat3("theta", 2.0 * Mat::identity(3));
    ref.finish();
    sc.ref = linear_reference(rate, offset, theta);
  }
  if (sec.has("disturbance")) {
    Section dist = sec.subsection("disturbance");
    sc.disturbance.amplitude =
        dist.vec("amplitude", sc.disturbance.amplitude, 3);
    sc.disturbance.omega = dist.num("omega", sc.disturbance.omega);
    sc.disturbance.phase = dist.num("phase", sc.disturbance.phase);
    dist.finish();
  }
  if (sec.has("certificate")) {
    Section cert = sec.subsection("certificate");
    LyapCert c;
    c.p1 = cert.num("p1", 0.0);
    c.p2 = cert.num("p2", 0.0);
    cert.finish();
    sc.cert = c;
  }
  sec.finish();
  (void)origin;
}

void parse_domain(Section sec, SamplingDomain& dom, double& safety,
                  std::size_t ctx_dim) {
  dom.ctx_lo = sec.vec("ctx_lo", dom.ctx_lo, ctx_dim);
  dom.ctx_hi = sec.vec("ctx_hi", dom.ctx_hi, ctx_dim);
  dom.t0 = sec.num("t0", dom.t0);
  dom.t1 = sec.num("t1", dom.t1);
  dom.time_points = sec.count("time_points", dom.time_points);
  dom.grid_points = sec.count("grid_points", dom.grid_points);
  dom.random_points = sec.count("random_points", dom.random_points);
  dom.seed = sec.u64("seed", dom.seed);
  dom.shell_radii = sec.count("shell_radii", dom.shell_radii);
  dom.shell_r_min = sec.num("shell_r_min", dom.shell_r_min);
  dom.shell_r_max = sec.num("shell_r_max", dom.shell_r_max);
  dom.shell_random_dirs =
      sec.count("shell_random_dirs", dom.shell_random_dirs);
  safety = sec.num("safety", safety);
  sec.finish();
}

void parse_design(Section sec, SearchOptions& s) {
  s.p2_start_fraction = sec.num("p2_start_fraction", s.p2_start_fraction);
  s.p2_fallback = sec.num("p2_fallback", s.p2_fallback);
  s.p2_steps = sec.count("p2_steps", s.p2_steps);
  s.p2_decades = sec.num("p2_decades", s.p2_decades);
  s.p1_steps = sec.count("p1_steps", s.p1_steps);
  s.p1_min = sec.num("p1_min", s.p1_min);
  s.p1_max = sec.num("p1_max", s.p1_max);
  s.k1_cap = sec.num("k1_cap", s.k1_cap);
  sec.finish();
}

SweepSpec parse_sweep(Section sec, const std::string& origin) {
  SweepSpec sweep;
  sweep.key = sec.text("key", "");
  if (sweep.key.empty()) fail(origin, "sweep.key", "must be a dotted path");
  if (sec.has("values")) {
    const json v = sec.take("values");
    if (!v.is_array() || v.empty()) {
      fail(origin, "sweep.values", "must be a non-empty array of numbers");
    }
    for (const json& x : v) {
      if (!x.is_number()) {
        fail(origin, "sweep.values", "entries must be numbers");
      }
      sweep.values.push_back(x.get<double>());
    }
  } else {
    const double from = sec.num("from", 0.0);
    const double to = sec.num("to", 0.0);
    const std::size_t n = sec.count("count", 0);
    const bool log_scale = sec.flag("log", false);
    if (n == 0) fail(origin, "sweep", "needs 'values' or from/to/count");
    if (log_scale && (!(from > 0.0) || !(to > 0.0))) {
      fail(origin, "sweep", "log grids need positive endpoints");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double f =
          (n == 1) ? 0.0
                   : static_cast<double>(i) / static_cast<double>(n - 1);
      sweep.values.push_back(log_scale
                                 ? from * std::pow(to / from, f)
                                 : from + f * (to - from));
    }
  }
  sec.finish();
  return sweep;
}

}  // namespace

SamplingDomain default_domain(const Scenario& scenario) {
  SamplingDomain dom;
  if (scenario.kind == PlantKind::robot) {
    dom.ctx_lo = Vec{-1.0, -1.0, -0.6, -1.0, -1.0, -1.0};
    dom.ctx_hi = Vec{1.0, 1.0, 0.6, 2.0, 2.0, 2.0};
    dom.t0 = 0.0;
    dom.t1 = 0.0;  // the robot callbacks depend on t only through the
                   // constant parts of the reference
    dom.time_points = 2;
    dom.grid_points = 3;
    dom.random_points = 200;
  } else {
    dom.ctx_lo = Vec{-1.0, -1.0};
    dom.ctx_hi = Vec{1.0, 1.0};
    dom.t0 = 0.0;
    dom.t1 = scenario.academic.omega != 0.0
                 ? 2.0 * std::numbers::pi / std::abs(scenario.academic.omega)
                 : 0.0;
    dom.time_points = 65;
    dom.grid_points = 3;
    dom.random_points = 64;
  }
  return dom;
}

LoadedConfig parse_config(const nlohmann::json& doc,
                          const std::string& origin) {
  if (!doc.is_object()) {
    throw input_error(origin + ": top level must be a JSON object");
  }
  Section top(doc, origin, "config");

  LoadedConfig cfg;
  cfg.raw = doc;

  if (top.has("plant")) parse_plant(top.subsection("plant"), origin,
                                    cfg.scenario);
  if (top.has("sta")) parse_sta(top.subsection("sta"), cfg.scenario.sta);
  if (top.has("scenario")) {
    parse_scenario(top.subsection("scenario"), origin, cfg.scenario);
  }

  cfg.domain = default_domain(cfg.scenario);
  if (top.has("domain")) {
    const std::size_t ctx_dim =
        cfg.scenario.kind == PlantKind::robot ? 6 : 2;
    parse_domain(top.subsection("domain"), cfg.domain, cfg.safety, ctx_dim);
  }
  if (top.has("design")) parse_design(top.subsection("design"), cfg.search);
  if (top.has("output")) {
    Section out = top.subsection("output");
    cfg.quiet = out.flag("quiet", cfg.quiet);
    out.finish();
  }
  if (top.has("sweep")) cfg.sweep = parse_sweep(top.subsection("sweep"),
                                                origin);
  top.finish();

  cfg.scenario.validate();
  cfg.domain.validate(cfg.scenario.kind == PlantKind::robot ? 6 : 2);
  cfg.search.validate();
  if (!(cfg.safety >= 1.0) || !std::isfinite(cfg.safety)) {
    throw input_error(origin + ": domain.safety must be >= 1");
  }
  return cfg;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw input_error("config '" + path + "': " + e.what());
  }
  return parse_config(doc, "config '" + path + "'");
}

nlohmann::ordered_json constants_to_json(const BoundConstants& c) {
  nlohmann::ordered_json out;
  for (const auto& [name, member] : BoundConstants::fields()) {
    out[name] = c.*member;
  }
  return out;
}

BoundConstants constants_from_json(const nlohmann::json& doc,
                                   const std::string& origin) {
  if (!doc.is_object()) {
    throw input_error(origin + ": constants document must be a JSON object");
  }
  json rest = doc;
  BoundConstants c;
  for (const auto& [name, member] : BoundConstants::fields()) {
    if (!rest.contains(name)) {
      throw input_error(origin + ": missing constant '" + std::string(name) +
                        "'");
    }
    const json v = rest.at(name);
    if (!v.is_number()) {
      throw input_error(origin + ": constant '" + std::string(name) +
                        "' must be a number");
    }
    c.*member = v.get<double>();
    rest.erase(name);
  }
  for (auto it = rest.begin(); it != rest.end(); ++it) {
    throw input_error(origin + ": unknown key '" + it.key() + "'");
  }
  c.validate();
  return c;
}

BoundConstants read_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("constants: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw input_error("constants '" + path + "': " + e.what());
  }
  return constants_from_json(doc, "constants '" + path + "'");
}

void write_constants(const std::string& path, const BoundConstants& c) {
  atomic_write(path, constants_to_json(c).dump(2) + "\n");
}

nlohmann::ordered_json design_to_json(const DesignResult& r) {
  nlohmann::ordered_json out;
  out["p1"] = r.p1;
  out["p2"] = r.p2;
  out["k1"] = r.k1;
  out["k2"] = r.k2;
  out["k1_interval"] = {r.k1_lo, r.k1_hi};
  out["feasibility_margin"] = r.feasibility_margin;
  nlohmann::ordered_json mid;
  mid["xi1"] = r.fns.Xi1;
  mid["xi2"] = r.fns.Xi2;
  mid["xi3"] = r.fns.Xi3;
  mid["gamma0"] = r.fns.Gamma0;
  mid["gamma1"] = r.fns.Gamma1;
  mid["gamma2"] = r.fns.Gamma2;
  mid["alpha0"] = r.alphas.alpha0;
  mid["alpha1"] = r.alphas.alpha1;
  mid["alpha2"] = r.alphas.alpha2;
  mid["gamma1_tilde"] = r.gamma1_tilde;
  out["intermediates"] = std::move(mid);
  return out;
}

void write_design(const std::string& path, const DesignResult& r) {
  atomic_write(path, design_to_json(r).dump(2) + "\n");
}

nlohmann::ordered_json summary_to_json(const RunSummary& s) {
  nlohmann::ordered_json out;
  out["converged"] = s.converged;
  if (s.t_conv) {
    out["t_conv"] = *s.t_conv;
  } else {
    out["t_conv"] = nullptr;
  }
  out["max_s_after_conv"] = s.max_s_after_conv;
  out["max_u"] = s.max_u;
  out["diverged"] = s.diverged;
  if (s.divergence_time) {
    out["divergence_time"] = *s.divergence_time;
  } else {
    out["divergence_time"] = nullptr;
  }
  return out;
}

namespace {

constexpr const char* kTraceHeader =
    "t,x,y,theta,xd,yd,thetad,s1,s2,s3,v1,v2,v3,u1,u2,u3,norm_s";

void append17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_padded(std::string& out, const Vec& v) {
  for (std::size_t i = 0; i < 3; ++i) {
    out += ',';
    append17(out, i < v.size() ? v[i] : 0.0);
  }
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace) {
  const std::size_t m = trace.size();
  if (trace.s.size() != m || trace.v.size() != m || trace.u.size() != m ||
      trace.norm_s.size() != m ||
      (trace.has_lyapunov() && trace.V.size() != m)) {
    throw input_error("write_trace_csv: ragged trace");
  }
  const bool robot_shape = !trace.q.empty();
  if (robot_shape && (trace.q.size() != m || trace.qdot.size() != m)) {
    throw input_error("write_trace_csv: ragged trace");
  }

  std::string out = kTraceHeader;
  if (trace.has_lyapunov()) out += ",V";
  out += '\n';
  const Vec zero3(3);
  for (std::size_t i = 0; i < m; ++i) {
    append17(out, trace.t[i]);
    append_padded(out, robot_shape ? trace.q[i] : zero3);
    append_padded(out, robot_shape ? trace.qdot[i] : zero3);
    append_padded(out, trace.s[i]);
    append_padded(out, trace.v[i]);
    append_padded(out, trace.u[i]);
    out += ',';
    append17(out, trace.norm_s[i]);
    if (trace.has_lyapunov()) {
      out += ',';
      append17(out, trace.V[i]);
    }
    out += '\n';
  }
  atomic_write(path, out);
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("trace: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw input_error("trace '" + path + "': empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool with_v = false;
  if (line == std::string(kTraceHeader) + ",V") {
    with_v = true;
  } else if (line != kTraceHeader) {
    throw input_error("trace '" + path + "': line 1: unexpected header '" +
                      line + "'");
  }
  const std::size_t want = with_v ? 18 : 17;

  Trace trace;
  trace.n = 3;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> cells;
    cells.reserve(want);
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw input_error("trace '" + path + "': line " +
                          std::to_string(lineno) + ": bad number '" + cell +
                          "'");
      }
      cells.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != want) {
      throw input_error("trace '" + path + "': line " +
                        std::to_string(lineno) + ": expected " +
                        std::to_string(want) + " columns, got " +
                        std::to_string(cells.size()));
    }
    trace.t.push_back(cells[0]);
    trace.q.push_back(Vec{cells[1], cells[2], cells[3]});
    trace.qdot.push_back(Vec{cells[4], cells[5], cells[6]});
    trace.s.push_back(Vec{cells[7], cells[8], cells[9]});
    trace.v.push_back(Vec{cells[10], cells[11], cells[12]});
    trace.u.push_back(Vec{cells[13], cells[14], cells[15]});
    trace.norm_s.push_back(cells[16]);
    if (with_v) trace.V.push_back(cells[17]);
  }
  if (trace.size() == 0) {
    throw input_error("trace '" + path + "': no data rows");
  }
  return trace;
}

void atomic_write(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::random_device rd;
  const fs::path tmp =
      target.parent_path() /
      (target.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw input_error("atomic_write: cannot create '" + tmp.string() + "'");
    }
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw input_error("atomic_write: write to '" + tmp.string() +
                        "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw input_error("atomic_write: rename to '" + path +
                      "' failed: " + ec.message());
  }
}

}  // namespace mgsta::io
