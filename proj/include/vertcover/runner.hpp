#pragma once

#include <string>
#include <vector>

#include "vertcover/analytic_map.hpp"
#include "vertcover/report.hpp"
#include "vertcover/transport.hpp"

namespace vertcover {

/*---------------------------------------------------------------------------
 * Run configuration
 *---------------------------------------------------------------------------*/

// Flat "key = value" text; list values comma-separated; '#' starts a
// comment.  Unknown keys and violated invariants raise ConfigError.
struct RunConfig {
  std::string function = "strip";        // catalog name or series file path
  std::vector<std::string> functions;    // verify set; empty = full catalog

  std::vector<double> rho_list{0.9};     // ascending
  std::vector<double> r_list{0.3, 0.6};  // ascending, each < min rho
  std::vector<double> delta_list{0.1};   // descending
  std::vector<double> r0_list{0.2, 0.1, 0.05};  // descending
  double r0 = 0.1;
  double delta = 0.1;       // analyze reachability pitch
  double trace_tol = 1e-3;  // chord deviation for level-curve tracing

  double t_floor = 0.01;          // expected excess for non-extremal maps
  std::vector<double> chain_window;  // {r1, r2}; empty = skip the chain

  std::string out_dir = "out";
  std::string golden_dir = "golden";
  std::string probe_region;  // region file checked as a B(r) stand-in
  bool record = false;
  bool strict = false;

  double series_margin = 1e-3;
  bool series_certified = false;
  int threads = 0;  // 0 = hardware concurrency (capped by VERTCOVER_THREADS)
};

RunConfig parse_config_text(const std::string& text);  // ConfigError
RunConfig load_config_file(const std::string& path);   // IoError/ConfigError

// Resolves a function name: catalog entry, else path to a coefficient
// file.  Theorem-level commands require a certified map (UncertifiedMap).
AnalyticMap resolve_map(const RunConfig& cfg, const std::string& name,
                        bool theorem_level);

/*---------------------------------------------------------------------------
 * Verification report
 *---------------------------------------------------------------------------*/

// One verdict row.  `margin >= 0` is a pass at the stated tolerance;
// theorem-backed rows are fatal on failure, the rest warn unless --strict.
struct CheckRow {
  std::string name;
  std::string function;
  Json params;  // offending tuple: rho / r / delta / side / r0 as applicable
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool theorem_backed = true;
  std::string note;
};

struct AnalyzeRow {
  double rho = 0.0;
  double l = 0.0;        // max vertical segment length at this rho
  double u0 = 0.0;       // attaining abscissa
  Interval v;            // attaining interval
  bool reachable = false;
  Polyline access;       // monotone curve from 0 to the segment's column
};

struct VerificationReport {
  std::string command;  // "analyze" or "verify"
  std::string function;
  std::vector<AnalyzeRow> rows;  // analyze only
  double l_measured = 0.0;       // max over rows
  Complex a1{0.0, 0.0};
  double corollary_slack = 0.0;  // 2 l / pi - |a1| (meaningful as rho -> 1)
  std::vector<CheckRow> checks;  // verify verdicts
  std::vector<ChainRow> chain;
  Json timings = Json::object();

  bool theorem_failure() const;
  bool warning_failure() const;
  Json to_json() const;
};

/*---------------------------------------------------------------------------
 * Commands
 *---------------------------------------------------------------------------*/

// Pure runners (no file output) used by the commands and by tests.
VerificationReport run_analyze(const RunConfig& cfg);
VerificationReport run_verify(const RunConfig& cfg);

// Artifact-writing commands behind the CLI verbs.  Exit codes: 0 ok,
// 1 theorem-backed failure (or any failure under --strict), 2 usage or
// module error (diagnostic on stderr).
int cmd_analyze(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_symmetrize(const RunConfig& cfg, const std::string& region_file);
int cmd_report(const RunConfig& cfg);

}  // namespace vertcover
