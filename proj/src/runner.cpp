#include "vertcover/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "vertcover/errors.hpp"
#include "vertcover/metric.hpp"
#include "vertcover/region_ops.hpp"
#include "vertcover/slab.hpp"

namespace vertcover {

namespace fs = std::filesystem;

/*---------------------------------------------------------------------------
 * Configuration
 *---------------------------------------------------------------------------*/

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + s + "'");
  }
}

int parse_int(const std::string& key, const std::string& s) {
  const double v = parse_double(key, s);
  if (v != std::floor(v))
    throw ConfigError("key '" + key + "': not an integer: '" + s + "'");
  return (int)v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s))
    out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

void require_radii(const std::string& key, const std::vector<double>& xs) {
  for (double x : xs)
    if (!(x > 0.0) || !(x < 1.0))
      throw ConfigError("key '" + key + "': radius " + std::to_string(x) +
                        " outside (0, 1)");
}

void require_order(const std::string& key, const std::vector<double>& xs,
                   bool ascending) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const bool ok = ascending ? xs[i] < xs[i + 1] : xs[i] > xs[i + 1];
    if (!ok)
      throw ConfigError("key '" + key + "': list must be strictly " +
                        (ascending ? "ascending" : "descending"));
  }
}

std::string sanitize_name(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum((unsigned char)c) || c == '.' || c == '-') ? c : '_';
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": empty key or value");

    if (key == "function") cfg.function = val;
    else if (key == "functions") cfg.functions = split_list(val);
    else if (key == "rho_list") cfg.rho_list = parse_double_list(key, val);
    else if (key == "r_list") cfg.r_list = parse_double_list(key, val);
    else if (key == "delta_list") cfg.delta_list = parse_double_list(key, val);
    else if (key == "r0_list") cfg.r0_list = parse_double_list(key, val);
    else if (key == "r0") cfg.r0 = parse_double(key, val);
    else if (key == "delta") cfg.delta = parse_double(key, val);
    else if (key == "trace_tol") cfg.trace_tol = parse_double(key, val);
    else if (key == "t_floor") cfg.t_floor = parse_double(key, val);
    else if (key == "chain_window")
      cfg.chain_window = parse_double_list(key, val);
    else if (key == "out_dir") cfg.out_dir = val;
    else if (key == "golden_dir") cfg.golden_dir = val;
    else if (key == "probe_region") cfg.probe_region = val;
    else if (key == "record") cfg.record = parse_bool(key, val);
    else if (key == "strict") cfg.strict = parse_bool(key, val);
    else if (key == "series_margin")
      cfg.series_margin = parse_double(key, val);
    else if (key == "series_certified")
      cfg.series_certified = parse_bool(key, val);
    else if (key == "threads") cfg.threads = parse_int(key, val);
    else
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
  }

  require_radii("rho_list", cfg.rho_list);
  require_radii("r_list", cfg.r_list);
  require_radii("r0_list", cfg.r0_list);
  require_radii("r0", {cfg.r0});
  require_order("rho_list", cfg.rho_list, true);
  require_order("r_list", cfg.r_list, true);
  require_order("delta_list", cfg.delta_list, false);
  require_order("r0_list", cfg.r0_list, false);
  for (double d : cfg.delta_list)
    if (!(d > 0.0)) throw ConfigError("delta_list entries must be positive");
  if (!(cfg.delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(cfg.trace_tol > 0.0))
    throw ConfigError("trace_tol must be positive");
  if (cfg.r_list.back() >= cfg.rho_list.front())
    throw ConfigError("r_list must stay below every rho in rho_list");
  if (!cfg.chain_window.empty()) {
    if (cfg.chain_window.size() != 2 ||
        !(cfg.chain_window[0] < cfg.chain_window[1]))
      throw ConfigError("chain_window must be 'r1, r2' with r1 < r2");
    require_radii("chain_window", cfg.chain_window);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

AnalyticMap resolve_map(const RunConfig& cfg, const std::string& name,
                        bool theorem_level) {
  const auto& names = catalog_names();
  AnalyticMap f =
      std::find(names.begin(), names.end(), name) != names.end()
          ? catalog_map(name)
          : load_power_series(name, cfg.series_margin, cfg.series_certified);
  if (theorem_level && !f.schlicht_certified)
    throw UncertifiedMap("function '" + name +
                         "' is not certified schlicht; theorem-level runs "
                         "require series_certified = true");
  return f;
}

/*---------------------------------------------------------------------------
 * Worker pool
 *---------------------------------------------------------------------------*/

namespace {

int pool_size(const RunConfig& cfg, std::size_t tasks) {
  int n = cfg.threads > 0 ? cfg.threads
                          : (int)std::thread::hardware_concurrency();
  if (n < 1) n = 1;
  if (const char* env = std::getenv("VERTCOVER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::min<int>(n, (int)std::max<std::size_t>(tasks, 1));
}

// Runs tasks[i] for all i on the pool; results land by index, so report
// assembly is deterministic regardless of scheduling.
void run_pool(const RunConfig& cfg,
              const std::vector<std::function<void()>>& tasks) {
  const int n = pool_size(cfg, tasks.size());
  if (n <= 1) {
    for (const auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve((std::size_t)n);
  for (int i = 0; i < n; ++i)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= tasks.size()) return;
        tasks[k]();
      }
    });
  for (auto& t : pool) t.join();
}

struct TaskOutcome {
  std::vector<CheckRow> rows;
  std::vector<ChainRow> chain;
  double elapsed_ms = 0.0;
  std::string context;
  std::exception_ptr error;
};

double now_ms() {
  return (double)std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
             .count() /
         1000.0;
}

void rethrow_first_failure(const std::vector<TaskOutcome>& outcomes) {
  for (const TaskOutcome& o : outcomes) {
    if (!o.error) continue;
    try {
      std::rethrow_exception(o.error);
    } catch (const Error& e) {
      throw Error(e.code(), o.context + ": " + e.what());
    }
  }
}

}  // namespace

/*---------------------------------------------------------------------------
 * Report serialization
 *---------------------------------------------------------------------------*/

namespace {

Json check_to_json(const CheckRow& c) {
  Json j;
  j["name"] = c.name;
  j["function"] = c.function;
  j["params"] = c.params;
  j["margin"] = c.margin;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  j["theorem_backed"] = c.theorem_backed;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json chain_to_json(const ChainRow& row) {
  Json j;
  j["r0"] = row.r0;
  j["r0_prime"] = row.r0_prime;
  j["eps"] = row.eps;
  j["t"] = row.t;
  j["lhs"] = row.lhs;
  j["rhs"] = row.rhs;
  j["gap"] = row.gap;
  return j;
}

}  // namespace

bool VerificationReport::theorem_failure() const {
  for (const CheckRow& c : checks)
    if (c.theorem_backed && !c.pass) return true;
  return false;
}

bool VerificationReport::warning_failure() const {
  for (const CheckRow& c : checks)
    if (!c.theorem_backed && !c.pass) return true;
  return false;
}

Json VerificationReport::to_json() const {
  Json j;
  j["schema"] = 1;
  j["command"] = command;
  j["function"] = function;
  if (command == "analyze") {
    j["rows"] = Json::array();
    for (const AnalyzeRow& r : rows) {
      Json jr;
      jr["rho"] = r.rho;
      jr["l"] = r.l;
      jr["u0"] = r.u0;
      jr["v"] = {r.v.lo, r.v.hi};
      jr["reachable"] = r.reachable;
      j["rows"].push_back(std::move(jr));
    }
    j["l_measured"] = l_measured;
    j["a1"] = {{"re", a1.real()}, {"im", a1.imag()}, {"abs", std::abs(a1)}};
    j["corollary_slack"] = corollary_slack;
  }
  j["checks"] = Json::array();
  for (const CheckRow& c : checks) j["checks"].push_back(check_to_json(c));
  if (!chain.empty()) {
    j["chain"] = Json::array();
    for (const ChainRow& row : chain) j["chain"].push_back(chain_to_json(row));
  }
  j["timings"] = timings;
  return j;
}

/*---------------------------------------------------------------------------
 * analyze
 *---------------------------------------------------------------------------*/

namespace {

// Staircase polyline from the origin cell to (jt, it), following the same
// move set the reachability fill used: one horizontal direction away from
// the origin column plus free vertical moves.
Polyline backtrack_access(const ReachGrid& g, int jt, int it) {
  Polyline out;
  const int dj = jt >= g.j0 ? +1 : -1;
  std::vector<int> parent(g.inside.size(), -2);
  std::deque<std::pair<int, int>> q;
  parent[g.idx(g.j0, g.i0)] = -1;
  q.emplace_back(g.j0, g.i0);
  while (!q.empty()) {
    const auto [j, i] = q.front();
    q.pop_front();
    if (j == jt && i == it) break;
    const int nbr[3][2] = {{j + dj, i}, {j, i + 1}, {j, i - 1}};
    for (const auto& n : nbr) {
      const int jj = n[0], ii = n[1];
      if (!g.cell_inside(jj, ii) || parent[g.idx(jj, ii)] != -2) continue;
      parent[g.idx(jj, ii)] = (int)g.idx(j, i);
      q.emplace_back(jj, ii);
    }
  }
  if (parent[g.idx(jt, it)] == -2) return out;  // unreachable

  std::vector<Complex> rev;
  for (int at = (int)g.idx(jt, it); at != -1; at = parent[(std::size_t)at]) {
    const int j = at / g.ny, i = at % g.ny;
    rev.emplace_back(g.x0 + (j + 0.5) * g.step, g.y0 + (i + 0.5) * g.step);
  }
  std::reverse(rev.begin(), rev.end());
  // Compress straight runs; keep corners only.
  out.closed = false;
  for (std::size_t i = 0; i < rev.size(); ++i) {
    if (i > 0 && i + 1 < rev.size()) {
      const Complex d1 = rev[i] - rev[i - 1], d2 = rev[i + 1] - rev[i];
      if (std::abs(d1.real() * d2.imag() - d1.imag() * d2.real()) < 1e-12)
        continue;
    }
    out.pts.push_back(rev[i]);
  }
  return out;
}

struct AnalyzeOutcome {
  AnalyzeRow row;
  Region region;
  double elapsed_ms = 0.0;
  std::string context;
  std::exception_ptr error;
};

AnalyzeRow analyze_one(const AnalyticMap& f, double rho, const RunConfig& cfg,
                       Region* region_out) {
  // Chord tolerance scaled to the image size so unbounded maps near the
  // unit circle stay tractable.
  const double umax = max_real_on_circle(f, rho);
  const double umin = -max_real_on_circle(f, rho, true);
  const double diam = std::max(umax - umin, 1e-6);
  const double tol = std::max(cfg.trace_tol, 1e-5 * diam);

  const Region region = level_region(f, rho, tol);
  const MaxSegment ms = max_vertical_segment(region);
  const BBox bb = bounding_box(region);
  const double step =
      std::max(cfg.delta / 4.0, std::max(bb.width(), bb.height()) / 2000.0);
  const ReachGrid rg = monotone_reachable_grid(region, step);

  const int jt = std::clamp(rg.col_of(ms.u), 0, rg.nx - 1);
  const int ilo = std::clamp(rg.row_of(ms.v.lo), 0, rg.ny - 1);
  const int ihi = std::clamp(rg.row_of(ms.v.hi), 0, rg.ny - 1);
  const int imid = std::clamp(rg.row_of(ms.v.mid()), ilo, ihi);
  int it = -1;
  for (int d = 0; d <= ihi - ilo; ++d) {  // nearest reached row to the middle
    if (imid + d <= ihi && rg.cell_reached(jt, imid + d)) { it = imid + d; break; }
    if (imid - d >= ilo && rg.cell_reached(jt, imid - d)) { it = imid - d; break; }
  }

  AnalyzeRow row;
  row.rho = rho;
  row.l = ms.length;
  row.u0 = ms.u;
  row.v = ms.v;
  row.reachable = it >= 0;
  if (it >= 0) row.access = backtrack_access(rg, jt, it);
  if (region_out) *region_out = region;
  return row;
}

}  // namespace

VerificationReport run_analyze(const RunConfig& cfg) {
  const AnalyticMap f = resolve_map(cfg, cfg.function, true);

  VerificationReport rep;
  rep.command = "analyze";
  rep.function = f.name;

  std::vector<AnalyzeOutcome> outcomes(cfg.rho_list.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < cfg.rho_list.size(); ++i) {
    tasks.push_back([&, i] {
      AnalyzeOutcome& o = outcomes[i];
      o.context = "analyze(f=" + f.name +
                  ", rho=" + std::to_string(cfg.rho_list[i]) + ")";
      const double t0 = now_ms();
      try {
        o.row = analyze_one(f, cfg.rho_list[i], cfg, &o.region);
      } catch (...) {
        o.error = std::current_exception();
      }
      o.elapsed_ms = now_ms() - t0;
    });
  }
  run_pool(cfg, tasks);
  for (const AnalyzeOutcome& o : outcomes) {
    if (!o.error) continue;
    try {
      std::rethrow_exception(o.error);
    } catch (const Error& e) {
      throw Error(e.code(), o.context + ": " + e.what());
    }
  }

  Json per_rho = Json::array();
  bool all_reachable = true;
  for (AnalyzeOutcome& o : outcomes) {
    rep.rows.push_back(o.row);
    rep.l_measured = std::max(rep.l_measured, o.row.l);
    all_reachable = all_reachable && o.row.reachable;
    per_rho.push_back(o.elapsed_ms);
  }
  rep.a1 = coefficient_a1(f);
  rep.corollary_slack = 2.0 * rep.l_measured / kPi - std::abs(rep.a1);

  CheckRow reach;
  reach.name = "segment_reachable";
  reach.function = f.name;
  reach.params = {{"rho_list", cfg.rho_list}};
  reach.margin = all_reachable ? 0.0 : -1.0;
  reach.pass = all_reachable;
  reach.theorem_backed = true;
  reach.note = "monotone curve from 0 reaches the maximal segment's column";
  rep.checks.push_back(std::move(reach));

  CheckRow cor;
  cor.name = "coefficient_bound";
  cor.function = f.name;
  cor.params = {{"rho_max", cfg.rho_list.back()}};
  cor.margin = rep.corollary_slack;
  cor.tolerance = 1e-3;
  // |a1| <= 2 l / pi holds in the limit rho -> 1; judged only near 1.
  cor.pass = cfg.rho_list.back() < 0.999 || rep.corollary_slack >= -1e-3;
  cor.theorem_backed = false;
  cor.note = "2 l / pi - |a1| at the largest rho";
  rep.checks.push_back(std::move(cor));

  rep.timings = {{"per_rho_ms", per_rho}};
  return rep;
}

/*---------------------------------------------------------------------------
 * verify
 *---------------------------------------------------------------------------*/

namespace {

bool is_strip_family(const std::string& name) {
  return name == "strip" || name == "rotated_strip";
}

bool is_nonextremal_catalog(const std::string& name) {
  return name == "koebe" || name == "half_plane" || name == "two_slit" ||
         name == "poly_convex";
}

CheckRow make_row(const std::string& name, const std::string& fn, Json params,
                  double margin, double tol, bool theorem, std::string note) {
  CheckRow c;
  c.name = name;
  c.function = fn;
  c.params = std::move(params);
  c.margin = margin;
  c.tolerance = tol;
  c.pass = margin >= -tol;
  c.theorem_backed = theorem;
  c.note = std::move(note);
  return c;
}

// One grid point: both side transports plus every per-tuple verdict.
TaskOutcome verify_tuple(const AnalyticMap& f, double rho, double r,
                         double delta, double t_floor) {
  TaskOutcome out;
  double mass[2] = {0.0, 0.0};
  for (const Side side : {Side::Positive, Side::Negative}) {
    const char* side_name = side == Side::Positive ? "pos" : "neg";
    const Json params = {
        {"rho", rho}, {"r", r}, {"delta", delta}, {"side", side_name}};
    const SideTransport st = make_side_transport(f, rho, r, delta, side);

    const Prop1Report p1 = check_prop1(st.dec, st.br);
    out.rows.push_back(make_row(
        "prop1", f.name, params, -(double)p1.violations, 0.0, true,
        std::to_string(p1.cells_checked) + " cells checked"));

    double min_slack = 0.0;
    for (const Prop2Result& p2 : check_prop2_all(st.dec, st.br))
      min_slack = std::min(min_slack, p2.rhs - p2.lhs);
    out.rows.push_back(make_row("prop2", f.name, params, min_slack, 1e-9,
                                true, "min section-chain slack over k"));

    double min_lift = 0.0;
    for (const CellTransport& ct : st.plan.cells)
      min_lift = std::min(min_lift, ct.lift);
    out.rows.push_back(make_row("transport_lift", f.name, params, min_lift,
                                1e-9, true, "min junction lift"));
    out.rows.push_back(make_row("transport_pattern", f.name, params,
                                st.plan.pattern_ok ? 0.0 : -1.0, 0.0, true,
                                "spans/hits/empty pattern monotone"));

    double value = 0.0;
    for (const Polyline& arc : positive_boundary_arcs(st.br))
      value += line_integral(arc, [&](Complex w) {
        return mu_plus(w, st.plan, st.dec);
      });
    mass[side == Side::Positive ? 0 : 1] = value;
    const double eps_report = std::max(0.0, 0.5 - value);
    Json mp = params;
    mp["value"] = value;
    mp["eps_report"] = eps_report;
    out.rows.push_back(make_row("side_mass_floor", f.name, mp, value - 0.45,
                                0.0, false,
                                "transported boundary mass per side"));
  }

  const double t = mass[0] + mass[1] - 1.0;
  Json tp = {{"rho", rho}, {"r", r}, {"delta", delta}, {"t", t}};
  out.rows.push_back(make_row("excess_nonnegative", f.name, tp, t, 1e-4,
                              true, "full boundary mass minus 1"));
  if (is_nonextremal_catalog(f.name))
    out.rows.push_back(make_row(
        "excess_floor", f.name, tp, t - t_floor, 0.0, false,
        "non-extremal maps keep a positive excess"));
  return out;
}

TaskOutcome verify_area_bound(const AnalyticMap& f, double rho, double r0,
                              double delta) {
  TaskOutcome out;
  const Prop4Result p4 = prop4_upper_bound(f, r0, rho, delta);
  Json params = {{"rho", rho},
                 {"r0", r0},
                 {"delta", delta},
                 {"value", p4.value},
                 {"bound", p4.bound},
                 {"bound_r0", p4.bound_r0},
                 {"r0_prime", p4.r0_prime}};
  out.rows.push_back(make_row("prop4", f.name, params, p4.bound - p4.value,
                              1e-4, true,
                              "area mass vs -(1/4pi) ln r0'"));
  return out;
}

TaskOutcome verify_containment(const AnalyticMap& f,
                               const std::vector<double>& r0_list) {
  TaskOutcome out;
  double prev_ratio = -1.0;
  double min_step = 1e9;
  for (double r0 : r0_list) {  // descending
    const double rp = containment_radius(f, r0);
    const double ratio = rp / r0;
    Json params = {{"r0", r0}, {"r0_prime", rp}, {"ratio", ratio}};
    out.rows.push_back(make_row("containment", f.name, params,
                                1.0 + 1e-9 - ratio, 0.0, true,
                                "inner radius never exceeds r0"));
    if (prev_ratio >= 0.0) min_step = std::min(min_step, ratio - prev_ratio);
    prev_ratio = ratio;
  }
  if (r0_list.size() > 1)
    out.rows.push_back(make_row("containment_trend", f.name,
                                {{"r0_list", r0_list}}, min_step, 1e-9,
                                false, "r0'/r0 approaches 1 as r0 shrinks"));
  return out;
}

TaskOutcome verify_schwarz(const AnalyticMap& f, double r) {
  TaskOutcome out;
  Json params = {{"r", r}};
  if (is_strip_family(f.name)) {
    const SchwarzResult s = schwarz_rigidity_check(f, r);
    Json p = params;
    p["r_prime"] = s.r_prime;
    p["sup_ratio"] = s.sup_ratio;
    out.rows.push_back(make_row("schwarz_radius", f.name, p,
                                1e-6 - std::abs(s.r_prime - r), 0.0, true,
                                "strip images keep |tanh w| = r"));
    out.rows.push_back(make_row("schwarz_ratio", f.name, p,
                                1.0 + 1e-8 - s.sup_ratio, 0.0, true,
                                "interior ratio bounded by 1"));
  } else {
    bool rejected = false;
    try {
      schwarz_rigidity_check(f, r);
    } catch (const NotATranslate&) {
      rejected = true;
    }
    out.rows.push_back(make_row("schwarz_reject", f.name, params,
                                rejected ? 0.0 : -1.0, 0.0, true,
                                "non-strip images are not translates"));
  }
  return out;
}

TaskOutcome verify_chain(const AnalyticMap& f, const RunConfig& cfg) {
  TaskOutcome out;
  out.chain = contradiction_chain(f, cfg.rho_list.back(), cfg.r0_list,
                                  cfg.chain_window[0], cfg.chain_window[1],
                                  cfg.delta_list.front());
  for (const ChainRow& row : out.chain) {
    Json params = {{"rho", cfg.rho_list.back()}, {"r0", row.r0},
                   {"gap", row.gap}, {"eps", row.eps}, {"t", row.t}};
    out.rows.push_back(make_row("chain_gap", f.name, params, 0.0, 0.0,
                                false, "lhs - rhs; negative forces the "
                                       "covering conclusion"));
  }
  return out;
}

TaskOutcome verify_probe(const AnalyticMap& f, double rho, double delta,
                         double trace_tol, const std::string& path) {
  TaskOutcome out;
  const Region probe = load_region_file(path);
  const LineSystem lines = build_line_system(f, rho, delta);
  const Region R = level_region(f, rho, trace_tol);
  const Decomposition dec = decompose(R, lines, Side::Positive);
  const Prop1Report p1 = check_prop1(dec, probe);
  Json params = {{"rho", rho}, {"delta", delta}, {"region", path},
                 {"violations", p1.violations}};
  Json items = Json::array();
  for (const auto& item : p1.items)
    items.push_back({{"cell", item.cell},
                     {"u_missing", item.u_missing},
                     {"u_meeting", item.u_meeting}});
  params["items"] = items;
  out.rows.push_back(make_row("prop1_probe", f.name, params,
                              -(double)p1.violations, 0.0, true,
                              "supplied region checked as a B(r) stand-in"));
  return out;
}

}  // namespace

VerificationReport run_verify(const RunConfig& cfg) {
  std::vector<std::string> names = cfg.functions;
  if (names.empty()) names = catalog_names();

  std::vector<AnalyticMap> maps;
  maps.reserve(names.size());
  for (const std::string& n : names) maps.push_back(resolve_map(cfg, n, true));

  VerificationReport rep;
  rep.command = "verify";
  {
    std::string joined;
    for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
    rep.function = joined;
  }

  std::vector<std::function<TaskOutcome()>> work;
  for (const AnalyticMap& f : maps) {
    for (double rho : cfg.rho_list) {
      for (double delta : cfg.delta_list)
        for (double r : cfg.r_list)
          work.push_back([&f, rho, r, delta, &cfg] {
            return verify_tuple(f, rho, r, delta, cfg.t_floor);
          });
      work.push_back([&f, rho, &cfg] {
        return verify_area_bound(f, rho, cfg.r0, cfg.delta_list.front());
      });
    }
    work.push_back([&f, &cfg] { return verify_containment(f, cfg.r0_list); });
    work.push_back([&f, &cfg] { return verify_schwarz(f, cfg.r_list.front()); });
    if (!cfg.chain_window.empty())
      work.push_back([&f, &cfg] { return verify_chain(f, cfg); });
  }
  if (!cfg.probe_region.empty()) {
    const AnalyticMap& f = maps.front();
    work.push_back([&f, &cfg] {
      return verify_probe(f, cfg.rho_list.front(), cfg.delta_list.front(),
                          cfg.trace_tol, cfg.probe_region);
    });
  }

  std::vector<TaskOutcome> outcomes(work.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < work.size(); ++i)
    tasks.push_back([&, i] {
      TaskOutcome& o = outcomes[i];
      const double t0 = now_ms();
      try {
        o = work[i]();
      } catch (...) {
        o.error = std::current_exception();
        o.context = "verify task " + std::to_string(i);
      }
      o.elapsed_ms = now_ms() - t0;
    });
  run_pool(cfg, tasks);
  rethrow_first_failure(outcomes);

  Json per_task = Json::array();
  for (TaskOutcome& o : outcomes) {
    for (CheckRow& c : o.rows) rep.checks.push_back(std::move(c));
    for (ChainRow& row : o.chain) rep.chain.push_back(row);
    per_task.push_back(o.elapsed_ms);
  }
  rep.timings = {{"per_task_ms", per_task}};
  return rep;
}

/*---------------------------------------------------------------------------
 * Commands
 *---------------------------------------------------------------------------*/

namespace {

std::string out_path(const RunConfig& cfg, const std::string& file) {
  return (fs::path(cfg.out_dir) / file).string();
}

void write_analyze_artifacts(const RunConfig& cfg, const AnalyticMap& f,
                             const VerificationReport& rep) {
  const std::string base = "analyze_" + sanitize_name(f.name);
  const std::string json_text = dump_json(rep.to_json());
  write_text_atomic(out_path(cfg, base + ".json"), json_text);

  std::ostringstream csv;
  csv << "rho,l,u0,reachable\n";
  char buf[160];
  for (const AnalyzeRow& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", r.rho, r.l,
                  r.u0, r.reachable ? 1 : 0);
    csv << buf;
  }
  write_text_atomic(out_path(cfg, base + ".csv"), csv.str());

  for (const AnalyzeRow& r : rep.rows) {
    // Region redrawn at figure tolerance; the verdict numbers above came
    // from the analysis-resolution region.
    const double umax = max_real_on_circle(f, r.rho);
    const double umin = -max_real_on_circle(f, r.rho, true);
    const double tol =
        std::max(cfg.trace_tol, 1e-4 * std::max(umax - umin, 1e-6));
    const Region region = level_region(f, r.rho, tol);

    SvgFigure fig;
    SvgStyle region_style;
    region_style.stroke = palette::kRegionStroke;
    region_style.fill = palette::kRegionFill;
    fig.add_region(region, region_style);
    if (r.access.pts.size() >= 2) {
      SvgStyle curve;
      curve.stroke = palette::kCurve;
      curve.stroke_width = 2.0;
      fig.add_polyline(r.access, curve);
    }
    SvgStyle seg;
    seg.stroke = palette::kSegment;
    seg.stroke_width = 2.5;
    fig.add_segment({r.u0, r.v.lo}, {r.u0, r.v.hi}, seg);

    std::snprintf(buf, sizeof buf, "%s_rho%.6g.svg", base.c_str(), r.rho);
    write_text_atomic(out_path(cfg, buf), fig.render());
  }

  if (cfg.record)
    write_text_atomic(
        (fs::path(cfg.golden_dir) / (base + ".json")).string(), json_text);
}

int exit_code(const RunConfig& cfg, const VerificationReport& rep) {
  if (rep.theorem_failure()) return 1;
  if (cfg.strict && rep.warning_failure()) return 1;
  return 0;
}

void print_failures(const VerificationReport& rep) {
  for (const CheckRow& c : rep.checks) {
    if (c.pass) continue;
    std::fprintf(stderr, "[%s] %s %s margin=%.3e tol=%.1e %s\n",
                 c.theorem_backed ? "FAIL" : "WARN", c.name.c_str(),
                 c.function.c_str(), c.margin, c.tolerance,
                 c.params.dump().c_str());
  }
}

}  // namespace

int cmd_analyze(const RunConfig& cfg) {
  const AnalyticMap f = resolve_map(cfg, cfg.function, true);
  const VerificationReport rep = run_analyze(cfg);
  write_analyze_artifacts(cfg, f, rep);
  print_failures(rep);
  std::printf("analyze %s: l = %.9f at rho = %.6g (u0 = %.6g, %s)\n",
              f.name.c_str(), rep.l_measured, cfg.rho_list.back(),
              rep.rows.back().u0,
              rep.rows.back().reachable ? "reachable" : "NOT reachable");
  return exit_code(cfg, rep);
}

int cmd_verify(const RunConfig& cfg) {
  const VerificationReport rep = run_verify(cfg);
  const std::string json_text = dump_json(rep.to_json());
  write_text_atomic(out_path(cfg, "verify.json"), json_text);
  if (cfg.record)
    write_text_atomic((fs::path(cfg.golden_dir) / "verify.json").string(),
                      json_text);
  print_failures(rep);
  int theorem_fails = 0, warns = 0;
  for (const CheckRow& c : rep.checks)
    if (!c.pass) (c.theorem_backed ? theorem_fails : warns)++;
  std::printf("verify [%s]: %zu checks, %d theorem failures, %d warnings\n",
              rep.function.c_str(), rep.checks.size(), theorem_fails, warns);
  return exit_code(cfg, rep);
}

int cmd_symmetrize(const RunConfig& cfg, const std::string& region_file) {
  const Region before = load_region_file(region_file);
  const Region after = steiner_symmetrize(before);

  const double area_before = region_area(before);
  const double area_after = region_area(after);
  const MaxSegment ms = max_vertical_segment(after);

  save_region_file(out_path(cfg, "symmetrized.json"), after);

  SvgFigure fig;
  SvgStyle ghost;
  ghost.stroke = palette::kGhost;
  ghost.stroke_width = 1.0;
  fig.add_region(before, ghost);
  SvgStyle filled;
  filled.stroke = palette::kRegionStroke;
  filled.fill = palette::kRegionFill;
  filled.opacity = 0.85;
  fig.add_region(after, filled);
  write_text_atomic(out_path(cfg, "symmetrize.svg"), fig.render());

  std::printf("symmetrize %s: area delta = %.3e, max cross-section = %.9f\n",
              region_file.c_str(), std::abs(area_after - area_before),
              ms.length);
  return 0;
}

/*---------------------------------------------------------------------------
 * report
 *---------------------------------------------------------------------------*/

namespace {

std::string fmt_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void render_verify_tables(const Json& j, std::ostringstream& md) {
  // eps(delta) trend: one row per (function, rho, r), one column per delta.
  struct Key {
    std::string fn;
    double rho = 0.0, r = 0.0;
    bool operator<(const Key& o) const {
      return std::tie(fn, rho, r) < std::tie(o.fn, o.rho, o.r);
    }
  };
  std::map<Key, std::map<double, double, std::greater<double>>> eps_rows;
  std::vector<const Json*> t_rows, contain_rows;
  for (const Json& c : j.at("checks")) {
    const std::string name = c.at("name");
    if (name == "side_mass_floor") {
      const Json& p = c.at("params");
      if (p.at("side") == "pos") {
        Key k;
        k.fn = c.at("function");
        k.rho = p.at("rho");
        k.r = p.at("r");
        eps_rows[k][p.at("delta").get<double>()] =
            p.at("eps_report").get<double>();
      }
    } else if (name == "excess_nonnegative") {
      t_rows.push_back(&c);
    } else if (name == "containment") {
      contain_rows.push_back(&c);
    }
  }

  if (!eps_rows.empty()) {
    std::vector<double> deltas;
    for (const auto& [k, m] : eps_rows)
      for (const auto& [d, e] : m)
        if (std::find(deltas.begin(), deltas.end(), d) == deltas.end())
          deltas.push_back(d);
    std::sort(deltas.rbegin(), deltas.rend());
    md << "\n### eps(delta) per function (positive side)\n\n";
    md << "| function | rho | r |";
    for (double d : deltas) md << " delta=" << fmt_num(d) << " |";
    md << "\n|---|---|---|";
    for (std::size_t i = 0; i < deltas.size(); ++i) md << "---|";
    md << "\n";
    for (const auto& [k, m] : eps_rows) {
      md << "| " << k.fn << " | " << fmt_num(k.rho) << " | " << fmt_num(k.r)
         << " |";
      for (double d : deltas) {
        const auto it = m.find(d);
        md << " " << (it == m.end() ? "-" : fmt_num(it->second)) << " |";
      }
      md << "\n";
    }
  }

  if (!t_rows.empty()) {
    md << "\n### boundary-mass excess t\n\n"
       << "| function | rho | r | delta | t |\n|---|---|---|---|---|\n";
    for (const Json* c : t_rows) {
      const Json& p = c->at("params");
      md << "| " << c->at("function").get<std::string>() << " | "
         << fmt_num(p.at("rho")) << " | " << fmt_num(p.at("r")) << " | "
         << fmt_num(p.at("delta")) << " | " << fmt_num(p.at("t")) << " |\n";
    }
  }

  if (!contain_rows.empty()) {
    md << "\n### containment ratios r0'/r0\n\n"
       << "| function | r0 | r0' | ratio |\n|---|---|---|---|\n";
    for (const Json* c : contain_rows) {
      const Json& p = c->at("params");
      md << "| " << c->at("function").get<std::string>() << " | "
         << fmt_num(p.at("r0")) << " | " << fmt_num(p.at("r0_prime"))
         << " | " << fmt_num(p.at("ratio")) << " |\n";
    }
  }

  if (j.contains("chain")) {
    md << "\n### contradiction chain\n\n"
       << "| r0 | r0' | eps | t | lhs | rhs | gap |\n"
       << "|---|---|---|---|---|---|---|\n";
    for (const Json& row : j.at("chain"))
      md << "| " << fmt_num(row.at("r0")) << " | "
         << fmt_num(row.at("r0_prime")) << " | " << fmt_num(row.at("eps"))
         << " | " << fmt_num(row.at("t")) << " | " << fmt_num(row.at("lhs"))
         << " | " << fmt_num(row.at("rhs")) << " | "
         << fmt_num(row.at("gap")) << " |\n";
  }
}

void render_analyze_table(const Json& j, std::ostringstream& md) {
  md << "\n### vertical segment lengths\n\n"
     << "| rho | l | u0 | reachable |\n|---|---|---|---|\n";
  for (const Json& r : j.at("rows"))
    md << "| " << fmt_num(r.at("rho")) << " | " << fmt_num(r.at("l"))
       << " | " << fmt_num(r.at("u0")) << " | "
       << (r.at("reachable").get<bool>() ? "yes" : "no") << " |\n";
  md << "\n- l_measured = " << fmt_num(j.at("l_measured")) << ", |a1| = "
     << fmt_num(j.at("a1").at("abs")) << ", corollary slack = "
     << fmt_num(j.at("corollary_slack")) << "\n";
}

}  // namespace

int cmd_report(const RunConfig& cfg) {
  std::ostringstream md;
  md << "# vertcover golden summary\n";

  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(cfg.golden_dir, ec))
    if (entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  if (ec || files.empty()) {
    md << "\nNo golden files under '" << cfg.golden_dir
       << "'. Run verify/analyze with record = true.\n";
  }

  std::vector<std::string> broken;
  for (const std::string& path : files) {
    Json j;
    try {
      j = Json::parse(read_text_file(path));
    } catch (const std::exception&) {
      broken.push_back(path);
      continue;
    }
    md << "\n## " << fs::path(path).filename().string() << "\n";
    if (!j.contains("command")) {
      broken.push_back(path);
      continue;
    }
    if (j.at("command") == "analyze")
      render_analyze_table(j, md);
    else
      render_verify_tables(j, md);
  }
  if (!broken.empty()) {
    md << "\n## unreadable golden files\n\n";
    for (const std::string& p : broken) md << "- " << p << "\n";
  }

  const std::string path = out_path(cfg, "report.md");
  write_text_atomic(path, md.str());
  std::printf("report: wrote %s (%zu golden files, %zu unreadable)\n",
              path.c_str(), files.size(), broken.size());
  return 0;
}

}  // namespace vertcover
