#include "vertcover/region_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "vertcover/errors.hpp"

namespace vertcover {

namespace {

struct Edge {
  double x0, y0, x1, y1;
  double xmin, xmax;
};

struct Tols {
  double snap;   // vertex-coincidence tolerance (1e-9 * diameter)
  double exact;  // rounding-level coincidence (1e-12 * diameter)
};

Tols region_tols(const Region& r) {
  const double diam = std::max(bounding_box(r).diameter(), 1e-30);
  Tols t;
  t.snap = r.snap_tol > 0.0 ? r.snap_tol : 1e-9 * diam;
  t.exact = 1e-12 * diam;
  return t;
}

void append_ring_edges(const std::vector<Complex>& ring,
                       std::vector<Edge>& edges) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex& a = ring[i];
    const Complex& b = ring[(i + 1) % n];
    if (a.real() == b.real()) continue;  // vertical edges never cross a line
    Edge e{a.real(), a.imag(), b.real(), b.imag(), 0, 0};
    e.xmin = std::min(e.x0, e.x1);
    e.xmax = std::max(e.x0, e.x1);
    edges.push_back(e);
  }
}

std::vector<Edge> collect_edges(const Region& r) {
  std::vector<Edge> edges;
  for (const auto& s : r.shells) append_ring_edges(s, edges);
  for (const auto& h : r.holes) append_ring_edges(h, edges);
  return edges;
}

std::vector<double> collect_vertex_xs(const Region& r) {
  std::vector<double> xs;
  for (const auto& s : r.shells)
    for (const auto& p : s) xs.push_back(p.real());
  for (const auto& h : r.holes)
    for (const auto& p : h) xs.push_back(p.real());
  std::sort(xs.begin(), xs.end());
  return xs;
}

bool near_sorted(const std::vector<double>& xs, double u, double tol) {
  auto it = std::lower_bound(xs.begin(), xs.end(), u);
  if (it != xs.end() && *it - u <= tol) return true;
  if (it != xs.begin() && u - *(it - 1) <= tol) return true;
  return false;
}

// Degenerate-line policy: an abscissa within snap_tol of a vertex is nudged
// by +2 snap_tol, retried at -2 snap_tol, and only rejected when every
// candidate still coincides with a vertex at rounding level (dense vertex
// clusters fall back to the robust half-open crossing rule at the original
// abscissa).
double resolve_section_u(const std::vector<double>& xs, double u,
                         const Tols& t) {
  const double cand[3] = {u, u + 2.0 * t.snap, u - 2.0 * t.snap};
  for (double c : cand)
    if (!near_sorted(xs, c, t.snap)) return c;
  for (double c : cand)
    if (!near_sorted(xs, c, t.exact)) return c;
  throw DegenerateLine("vertical line u = " + std::to_string(u) +
                       " coincides with vertex abscissas even after "
                       "perturbation");
}

std::vector<Interval> pair_crossings(std::vector<double>& ys, double exact) {
  if (ys.size() % 2 != 0)
    throw EvalError("odd crossing parity on a vertical line (" +
                    std::to_string(ys.size()) + " crossings)");
  std::sort(ys.begin(), ys.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < ys.size(); i += 2) {
    Interval iv{ys[i], ys[i + 1]};
    if (!out.empty() && iv.lo - out.back().hi <= exact)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  // Keep tangential touches out of the section list.
  std::vector<Interval> clean;
  for (const auto& iv : out)
    if (iv.length() > exact) clean.push_back(iv);
  return clean;
}

}  // namespace

/*---------------------------------------------------------------------------
 * Construction
 *---------------------------------------------------------------------------*/

Region region_from_polyline(const Polyline& poly) {
  if (!poly.closed)
    throw DomainError("region construction requires a closed polyline");
  std::vector<Complex> ring;
  ring.reserve(poly.pts.size());
  for (const auto& p : poly.pts)
    if (ring.empty() || p != ring.back()) ring.push_back(p);
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3)
    throw DomainError("region boundary needs at least 3 distinct vertices");
  if (signed_ring_area(ring) < 0.0)
    std::reverse(ring.begin(), ring.end());
  Region r;
  r.shells.push_back(std::move(ring));
  r.snap_tol = 1e-9 * bounding_box(r).diameter();
  return r;
}

/*---------------------------------------------------------------------------
 * Sections
 *---------------------------------------------------------------------------*/

std::vector<CrossSection> vertical_cross_sections(
    const Region& region, const std::vector<double>& us) {
  const Tols tols = region_tols(region);
  const std::vector<double> xs = collect_vertex_xs(region);
  std::vector<Edge> edges = collect_edges(region);

  std::vector<CrossSection> out(us.size());
  std::vector<std::size_t> order(us.size());
  std::iota(order.begin(), order.end(), (std::size_t)0);
  for (std::size_t q = 0; q < us.size(); ++q) {
    out[q].u = us[q];
    out[q].u_effective = resolve_section_u(xs, us[q], tols);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out[a].u_effective < out[b].u_effective;
  });
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.xmin < b.xmin; });

  std::vector<std::uint32_t> active;
  std::size_t ptr = 0;
  std::vector<double> ys;
  for (std::size_t q : order) {
    const double u = out[q].u_effective;
    while (ptr < edges.size() && edges[ptr].xmin <= u)
      active.push_back((std::uint32_t)ptr++);
    ys.clear();
    for (std::size_t k = 0; k < active.size();) {
      const Edge& e = edges[active[k]];
      if (e.xmax <= u) {
        active[k] = active.back();
        active.pop_back();
        continue;
      }
      const double t = (u - e.x0) / (e.x1 - e.x0);
      ys.push_back(e.y0 + t * (e.y1 - e.y0));
      ++k;
    }
    out[q].intervals = pair_crossings(ys, tols.exact);
  }
  return out;
}

CrossSection vertical_cross_section(const Region& region, double u) {
  return vertical_cross_sections(region, {u})[0];
}

bool region_contains(const Region& region, Complex p) {
  const Tols tols = region_tols(region);
  const std::vector<double> xs = collect_vertex_xs(region);
  const double u = resolve_section_u(xs, p.real(), tols);
  int below = 0;
  const std::vector<Edge> edges = collect_edges(region);
  for (const Edge& e : edges) {
    if (!(e.xmin <= u && u < e.xmax)) continue;
    const double t = (u - e.x0) / (e.x1 - e.x0);
    const double y = e.y0 + t * (e.y1 - e.y0);
    if (y < p.imag()) ++below;
  }
  return (below % 2) == 1;
}

/*---------------------------------------------------------------------------
 * SectionIndex
 *---------------------------------------------------------------------------*/

SectionIndex::SectionIndex(const Region& region) : region_(&region) {
  const Tols tols = region_tols(region);
  snap_ = tols.snap;
  exact_ = tols.exact;
  vertex_xs_ = collect_vertex_xs(region);
  const auto raw = collect_edges(region);
  edges_.reserve(raw.size());
  for (const auto& e : raw) edges_.push_back({e.x0, e.y0, e.x1, e.y1});

  const BBox bb = bounding_box(region);
  xlo_ = bb.xlo;
  xhi_ = bb.xhi;
  const std::size_t nb = std::clamp<std::size_t>(edges_.size() / 4, 16, 8192);
  bucket_w_ = std::max((xhi_ - xlo_) / (double)nb, 1e-300);
  buckets_.assign(nb, {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const double lo = std::min(e.x0, e.x1);
    const double hi = std::max(e.x0, e.x1);
    auto b0 = (std::size_t)std::clamp(
        (std::int64_t)std::floor((lo - xlo_) / bucket_w_), (std::int64_t)0,
        (std::int64_t)nb - 1);
    auto b1 = (std::size_t)std::clamp(
        (std::int64_t)std::floor((hi - xlo_) / bucket_w_), (std::int64_t)0,
        (std::int64_t)nb - 1);
    for (std::size_t b = b0; b <= b1; ++b)
      buckets_[b].push_back((std::uint32_t)i);
  }
}

double SectionIndex::resolve_u(double u) const {
  Tols t{snap_, exact_};
  return resolve_section_u(vertex_xs_, u, t);
}

CrossSection SectionIndex::section(double u) const {
  CrossSection cs;
  cs.u = u;
  cs.u_effective = resolve_u(u);
  const double c = cs.u_effective;
  std::vector<double> ys;
  if (c >= xlo_ && c <= xhi_ && !buckets_.empty()) {
    const auto b = (std::size_t)std::clamp(
        (std::int64_t)std::floor((c - xlo_) / bucket_w_), (std::int64_t)0,
        (std::int64_t)buckets_.size() - 1);
    for (std::uint32_t i : buckets_[b]) {
      const auto& e = edges_[i];
      const double xmin = std::min(e.x0, e.x1);
      const double xmax = std::max(e.x0, e.x1);
      if (!(xmin <= c && c < xmax)) continue;
      const double t = (c - e.x0) / (e.x1 - e.x0);
      ys.push_back(e.y0 + t * (e.y1 - e.y0));
    }
  }
  cs.intervals = pair_crossings(ys, exact_);
  return cs;
}

bool SectionIndex::contains(Complex p) const {
  double c;
  try {
    c = resolve_u(p.real());
  } catch (const DegenerateLine&) {
    return false;
  }
  if (c < xlo_ || c > xhi_ || buckets_.empty()) return false;
  const auto b = (std::size_t)std::clamp(
      (std::int64_t)std::floor((c - xlo_) / bucket_w_), (std::int64_t)0,
      (std::int64_t)buckets_.size() - 1);
  int below = 0;
  for (std::uint32_t i : buckets_[b]) {
    const auto& e = edges_[i];
    const double xmin = std::min(e.x0, e.x1);
    const double xmax = std::max(e.x0, e.x1);
    if (!(xmin <= c && c < xmax)) continue;
    const double t = (c - e.x0) / (e.x1 - e.x0);
    const double y = e.y0 + t * (e.y1 - e.y0);
    if (y < p.imag()) ++below;
  }
  return (below % 2) == 1;
}

/*---------------------------------------------------------------------------
 * Area
 *---------------------------------------------------------------------------*/

double region_area(const Region& region) {
  double acc = 0.0;
  for (const auto& s : region.shells) acc += std::abs(signed_ring_area(s));
  for (const auto& h : region.holes) acc -= std::abs(signed_ring_area(h));
  return acc;
}

double region_area_monte_carlo(const Region& region, int samples,
                               std::uint64_t seed) {
  if (samples <= 0) return 0.0;
  const BBox bb = bounding_box(region);
  SectionIndex idx(region);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bb.xlo, bb.xhi);
  std::uniform_real_distribution<double> uy(bb.ylo, bb.yhi);
  long long hits = 0;
  for (int i = 0; i < samples; ++i)
    if (idx.contains({ux(rng), uy(rng)})) ++hits;
  return bb.width() * bb.height() * (double)hits / (double)samples;
}

/*---------------------------------------------------------------------------
 * Slab scan shared by symmetrization and the longest-segment search
 *---------------------------------------------------------------------------*/

namespace {

struct SlabScan {
  std::vector<double> events;           // dedup ascending vertex abscissas
  std::vector<CrossSection> at_a;       // section at 1/3 of each slab
  std::vector<CrossSection> at_b;       // section at 2/3 of each slab
  std::vector<double> mid_u;            // slab midpoints
  Tols tols;
};

SlabScan scan_slabs(const Region& region) {
  SlabScan s;
  s.tols = region_tols(region);
  std::vector<double> xs = collect_vertex_xs(region);
  for (double x : xs)
    if (s.events.empty() || x - s.events.back() > s.tols.exact)
      s.events.push_back(x);
  const std::size_t nslab = s.events.size() >= 2 ? s.events.size() - 1 : 0;
  std::vector<double> queries;
  queries.reserve(2 * nslab);
  for (std::size_t i = 0; i < nslab; ++i) {
    const double e0 = s.events[i], e1 = s.events[i + 1];
    const double w = e1 - e0;
    if (w <= 4.0 * s.tols.exact) {
      const double m = 0.5 * (e0 + e1);
      queries.push_back(m);
      queries.push_back(m);
    } else {
      queries.push_back(e0 + w / 3.0);
      queries.push_back(e0 + 2.0 * w / 3.0);
    }
  }
  auto sections = vertical_cross_sections(region, queries);
  s.at_a.resize(nslab);
  s.at_b.resize(nslab);
  s.mid_u.resize(nslab);
  for (std::size_t i = 0; i < nslab; ++i) {
    s.at_a[i] = std::move(sections[2 * i]);
    s.at_b[i] = std::move(sections[2 * i + 1]);
    s.mid_u[i] = 0.5 * (s.events[i] + s.events[i + 1]);
  }
  return s;
}

}  // namespace

/*---------------------------------------------------------------------------
 * Steiner symmetrization
 *---------------------------------------------------------------------------*/

Region steiner_symmetrize(const Region& region,
                          const std::vector<double>& extra_grid) {
  const SlabScan scan = scan_slabs(region);
  const std::size_t nslab =
      scan.events.size() >= 2 ? scan.events.size() - 1 : 0;
  if (nslab == 0)
    throw DomainError("symmetrization needs a region with positive width");
  const double thr = scan.tols.exact;

  // Section measure is linear between vertex abscissas: recover the exact
  // endpoint values from two interior samples.
  std::vector<double> mL(nslab), mR(nslab);
  for (std::size_t i = 0; i < nslab; ++i) {
    const double ma = scan.at_a[i].measure();
    const double mb = scan.at_b[i].measure();
    mL[i] = std::max(0.0, 2.0 * ma - mb);
    mR[i] = std::max(0.0, 2.0 * mb - ma);
  }

  std::vector<double> grid(extra_grid);
  std::sort(grid.begin(), grid.end());

  Region out;
  std::size_t i = 0;
  while (i < nslab) {
    if (std::max(mL[i], mR[i]) <= thr) {
      ++i;
      continue;
    }
    // Extend the run while consecutive slabs stay connected.
    std::size_t j = i;
    while (j + 1 < nslab && std::max(mL[j + 1], mR[j + 1]) > thr &&
           std::max(mR[j], mL[j + 1]) > thr)
      ++j;

    // Height profile along [events[i], events[j+1]] as (u, h) pairs.
    std::vector<std::pair<double, double>> prof;
    prof.emplace_back(scan.events[i], mL[i]);
    for (std::size_t k = i; k <= j; ++k) {
      const double e0 = scan.events[k], e1 = scan.events[k + 1];
      const double w = std::max(e1 - e0, 1e-300);
      auto g0 = std::upper_bound(grid.begin(), grid.end(), e0);
      auto g1 = std::lower_bound(grid.begin(), grid.end(), e1);
      for (auto it = g0; it != g1; ++it) {
        const double h = mL[k] + (*it - e0) / w * (mR[k] - mL[k]);
        prof.emplace_back(*it, std::max(0.0, h));
      }
      prof.emplace_back(e1, mR[k]);
      if (k < j && std::abs(mL[k + 1] - mR[k]) > thr)
        prof.emplace_back(e1, mL[k + 1]);  // jump: vertical boundary edge
    }

    // Ring: lower chain left-to-right, then upper chain right-to-left (CCW).
    std::vector<Complex> ring;
    auto push = [&](Complex p) {
      if (ring.empty() || std::abs(p - ring.back()) > thr) ring.push_back(p);
    };
    for (const auto& [u, h] : prof) push({u, -0.5 * h});
    for (auto it = prof.rbegin(); it != prof.rend(); ++it)
      push({it->first, 0.5 * it->second});
    while (ring.size() >= 2 &&
           std::abs(ring.front() - ring.back()) <= thr)
      ring.pop_back();
    if (ring.size() >= 3) out.shells.push_back(std::move(ring));
    i = j + 1;
  }

  if (out.shells.empty())
    throw DomainError("symmetrization produced an empty region");
  out.snap_tol = 1e-9 * bounding_box(out).diameter();
  return out;
}

/*---------------------------------------------------------------------------
 * Longest vertical segment
 *---------------------------------------------------------------------------*/

MaxSegment max_vertical_segment(const Region& region, int grid) {
  const SlabScan scan = scan_slabs(region);
  const std::size_t nslab =
      scan.events.size() >= 2 ? scan.events.size() - 1 : 0;
  if (nslab == 0) throw DomainError("region has no width");
  const double diam = bounding_box(region).diameter();
  const double tie = 1e-12 * diam;

  struct Cand {
    double len, u;
    Interval iv;
  };
  std::vector<Cand> cands;

  auto consider_section = [&](const CrossSection& cs) {
    for (const auto& iv : cs.intervals)
      cands.push_back({iv.length(), cs.u, iv});
  };

  for (std::size_t i = 0; i < nslab; ++i) {
    consider_section(scan.at_a[i]);
    consider_section(scan.at_b[i]);
    // Pairwise interval extrapolation to both slab ends (valid when the
    // interval count is constant across the slab).
    const auto& A = scan.at_a[i].intervals;
    const auto& B = scan.at_b[i].intervals;
    if (A.size() == B.size()) {
      for (std::size_t k = 0; k < A.size(); ++k) {
        const double lol = 2.0 * A[k].lo - B[k].lo;
        const double hil = 2.0 * A[k].hi - B[k].hi;
        const double lor = 2.0 * B[k].lo - A[k].lo;
        const double hir = 2.0 * B[k].hi - A[k].hi;
        if (hil > lol)
          cands.push_back({hil - lol, scan.events[i], {lol, hil}});
        if (hir > lor)
          cands.push_back({hir - lor, scan.events[i + 1], {lor, hir}});
      }
    }
  }

  if (grid > 1) {
    const double xlo = scan.events.front(), xhi = scan.events.back();
    std::vector<double> us((std::size_t)grid);
    for (int g = 0; g < grid; ++g)
      us[(std::size_t)g] = xlo + (xhi - xlo) * (g + 0.5) / grid;
    for (const auto& cs : vertical_cross_sections(region, us))
      consider_section(cs);
  }

  if (cands.empty()) throw DomainError("region has no vertical sections");
  double best_len = 0.0;
  for (const auto& c : cands) best_len = std::max(best_len, c.len);
  const Cand* best = nullptr;
  for (const auto& c : cands)
    if (c.len >= best_len - tie && (!best || c.u < best->u)) best = &c;
  return {best->len, best->u, best->iv};
}

/*---------------------------------------------------------------------------
 * Monotone reachability on a grid
 *---------------------------------------------------------------------------*/

std::vector<Interval> ReachGrid::reachable_columns() const {
  std::vector<Interval> out;
  for (int j = 0; j < nx; ++j) {
    bool any = false;
    for (int i = 0; i < ny && !any; ++i) any = cell_reached(j, i);
    if (!any) continue;
    const Interval iv{x0 + j * step, x0 + (j + 1) * step};
    if (!out.empty() && iv.lo - out.back().hi <= 1e-12 * step)
      out.back().hi = iv.hi;
    else
      out.push_back(iv);
  }
  return out;
}

double ReachGrid::max_reached_u() const {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < ny; ++i)
      if (cell_reached(j, i)) best = std::max(best, x0 + (j + 1) * step);
  return best;
}

double ReachGrid::min_reached_u() const {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < ny; ++i)
      if (cell_reached(j, i)) best = std::min(best, x0 + j * step);
  return best;
}

ReachGrid monotone_reachable_grid(const Region& region, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  if (!region_contains(region, {0.0, 0.0}))
    throw OriginOutside("w = 0 lies outside the region");

  const BBox bb = bounding_box(region);
  ReachGrid g;
  g.x0 = bb.xlo;
  g.y0 = bb.ylo;
  g.step = step;
  g.nx = std::max(1, (int)std::ceil(bb.width() / step));
  g.ny = std::max(1, (int)std::ceil(bb.height() / step));
  if ((long long)g.nx * g.ny > 400000000ll)
    throw DomainError("grid step too small: " + std::to_string(g.nx) + " x " +
                      std::to_string(g.ny) + " cells");
  g.inside.assign((std::size_t)g.nx * (std::size_t)g.ny, 0);
  g.reached.assign(g.inside.size(), 0);

  std::vector<double> cols((std::size_t)g.nx);
  for (int j = 0; j < g.nx; ++j) cols[(std::size_t)j] = g.x0 + (j + 0.5) * step;
  const auto sections = vertical_cross_sections(region, cols);
  for (int j = 0; j < g.nx; ++j) {
    const auto& cs = sections[(std::size_t)j];
    for (const auto& iv : cs.intervals) {
      int ilo = std::max(0, (int)std::floor((iv.lo - g.y0) / step));
      int ihi = std::min(g.ny - 1, (int)std::floor((iv.hi - g.y0) / step));
      for (int i = ilo; i <= ihi; ++i) {
        const double cy = g.y0 + (i + 0.5) * step;
        if (iv.contains(cy)) g.inside[g.idx(j, i)] = 1;
      }
    }
  }

  g.j0 = std::clamp(g.col_of(0.0), 0, g.nx - 1);
  g.i0 = std::clamp(g.row_of(0.0), 0, g.ny - 1);
  // The origin's own cell is traversable even when its center misses the
  // region (coarse grids near a boundary).
  g.inside[g.idx(g.j0, g.i0)] = 1;

  auto bfs = [&](int dj_sign) {
    std::deque<std::pair<int, int>> q;
    q.emplace_back(g.j0, g.i0);
    std::vector<std::uint8_t> seen(g.inside.size(), 0);
    seen[g.idx(g.j0, g.i0)] = 1;
    g.reached[g.idx(g.j0, g.i0)] = 1;
    while (!q.empty()) {
      auto [j, i] = q.front();
      q.pop_front();
      const int nbr[3][2] = {{j + dj_sign, i}, {j, i + 1}, {j, i - 1}};
      for (const auto& n : nbr) {
        const int jj = n[0], ii = n[1];
        if (!g.in_range(jj, ii) || seen[g.idx(jj, ii)] ||
            !g.inside[g.idx(jj, ii)])
          continue;
        seen[g.idx(jj, ii)] = 1;
        g.reached[g.idx(jj, ii)] = 1;
        q.emplace_back(jj, ii);
      }
    }
  };
  bfs(+1);
  bfs(-1);
  return g;
}

}  // namespace vertcover
