/**
 * @file io.hpp
 * @brief Config loading, JSON serialization of results, and trace CSV I/O.
 *
 * The config document is JSON with the sections `plant`, `sta`, `domain`,
 * `design`, `scenario`, `output` and (optionally) `sweep`. Every section is
 * optional and defaults to the flagship robot scenario; unknown keys are
 * rejected with a path-anchored message.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgsta/bounds.hpp"
#include "mgsta/gain_design.hpp"
#include "mgsta/simulate.hpp"

namespace mgsta::io {

/// One-dimensional parameter sweep over a dotted config key.
struct SweepSpec {
  std::string key;            ///< dotted path, e.g. "plant.g_bar"
  std::vector<double> values; ///< explicit grid (already expanded)
};

/// Everything a command needs, assembled from one config document.
struct LoadedConfig {
  Scenario scenario;            ///< plant kind, params, sta, reference, run
  SamplingDomain domain;        ///< bound-estimation domain (defaulted)
  double safety = 1.05;         ///< bound-estimation safety factor
  SearchOptions search;         ///< gain-search grid options
  bool quiet = false;
  std::optional<SweepSpec> sweep;
  nlohmann::json raw;           ///< original document (sweep re-instantiates)
};

/// Parses a config document. `origin` names the source for error messages.
LoadedConfig parse_config(const nlohmann::json& doc, const std::string& origin);

/// Reads and parses a config file; JSON syntax errors are reported with the
/// parser's line/column anchor.
LoadedConfig load_config(const std::string& path);

/// Default bound-sampling domain for a scenario's plant. The robot default
/// covers tracking errors up to 1 in x/y, heading errors up to 0.6 rad, and
/// velocities in [-1, 2]; the academic default covers x in [-1, 1]^2 over
/// one full period of the coupling signal.
SamplingDomain default_domain(const Scenario& scenario);

nlohmann::ordered_json constants_to_json(const BoundConstants& c);
BoundConstants constants_from_json(const nlohmann::json& doc,
                                   const std::string& origin);
BoundConstants read_constants(const std::string& path);
void write_constants(const std::string& path, const BoundConstants& c);

nlohmann::ordered_json design_to_json(const DesignResult& r);
void write_design(const std::string& path, const DesignResult& r);

nlohmann::ordered_json summary_to_json(const RunSummary& s);

/// Writes a trace as CSV with the fixed column set
/// t,x,y,theta,xd,yd,thetad,s1,s2,s3,v1,v2,v3,u1,u2,u3,norm_s,V.
/// The V column is present only when the trace carries Lyapunov values.
/// Academic traces are padded to the robot shape with zeros. Values use 17
/// significant digits, so a round-trip is bit-exact.
void write_trace_csv(const std::string& path, const Trace& trace);

/// Reads a trace CSV produced by write_trace_csv. Throws input_error with a
/// line anchor on any malformed or truncated row.
Trace read_trace_csv(const std::string& path);

/// Serializes `contents` to `path` atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace mgsta::io
