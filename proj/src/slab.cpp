#include "vertcover/slab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include "vertcover/errors.hpp"

namespace vertcover {

namespace {

// d(Re f(rho e^{i phi}))/dphi; zero exactly where the level curve has a
// vertical tangent.
double dre_dphi(const AnalyticMap& f, double rho, double phi) {
  const Complex z = std::polar(rho, phi);
  return (Complex{0.0, 1.0} * z * f.deriv(z)).real();
}

}  // namespace

/*---------------------------------------------------------------------------
 * Line system
 *---------------------------------------------------------------------------*/

LineSystem build_line_system(const AnalyticMap& f, double rho, double delta) {
  if (!(rho > 0.0) || rho >= f.max_radius())
    throw DomainError("line system radius " + std::to_string(rho) +
                      " outside (0, " + std::to_string(f.max_radius()) + ")");
  if (!(delta > 0.0)) throw DomainError("line pitch delta must be positive");

  // Tangent abscissas via sign changes of the phi-derivative.  The grid is
  // offset by half a step: real-coefficient maps have *exact* zeros at
  // phi = 0 and pi, which an aligned grid silently skips.
  constexpr int kGrid = 4096;
  const auto phi_at = [&](int k) { return 2.0 * kPi * (k + 0.5) / kGrid; };
  std::vector<double> val((std::size_t)kGrid);
  for (int k = 0; k < kGrid; ++k) {
    double v = dre_dphi(f, rho, phi_at(k));
    if (v == 0.0) v = dre_dphi(f, rho, phi_at(k) + 1e-9);
    val[(std::size_t)k] = v;
  }
  std::vector<double> tangents;
  for (int k = 0; k < kGrid; ++k) {
    const int j = (k + 1) % kGrid;
    if (!(val[(std::size_t)k] * val[(std::size_t)j] < 0.0)) continue;
    double a = phi_at(k), b = phi_at(k) + 2.0 * kPi / kGrid;
    double fa = val[(std::size_t)k];
    int it = 0;
    while (b - a > 1e-13) {
      if (++it > 200)
        throw RefinementLimit("tangent bisection failed to converge at rho " +
                              std::to_string(rho));
      const double m = 0.5 * (a + b);
      const double fm = dre_dphi(f, rho, m);
      if (fa * fm <= 0.0)
        b = m;
      else {
        a = m;
        fa = fm;
      }
    }
    tangents.push_back(f.eval(std::polar(rho, 0.5 * (a + b))).real());
  }
  const double umax = max_real_on_circle(f, rho);
  const double umin = -max_real_on_circle(f, rho, true);
  tangents.push_back(umin);
  tangents.push_back(umax);

  const double extent = std::max(umax - umin, 1e-12);
  const double dedup = 1e-9 * extent;

  LineSystem ls;
  ls.includes_tangents = true;
  std::sort(tangents.begin(), tangents.end());
  for (double t : tangents)
    if (ls.tangent_us.empty() || t - ls.tangent_us.back() > dedup)
      ls.tangent_us.push_back(t);

  std::vector<double> us = ls.tangent_us;
  const int npts = std::max(1, (int)std::ceil(extent / delta));
  for (int k = 0; k <= npts; ++k)
    us.push_back(umin + extent * (double)k / (double)npts);
  std::sort(us.begin(), us.end());
  for (double u : us)
    if (ls.u_values.empty() || u - ls.u_values.back() > dedup)
      ls.u_values.push_back(u);

  ls.delta = 0.0;
  for (std::size_t i = 0; i + 1 < ls.u_values.size(); ++i)
    ls.delta = std::max(ls.delta, ls.u_values[i + 1] - ls.u_values[i]);
  return ls;
}

/*---------------------------------------------------------------------------
 * Regions and reflection
 *---------------------------------------------------------------------------*/

Region reflect_region(const Region& r) {
  Region out;
  out.snap_tol = r.snap_tol;
  const auto flip = [](const std::vector<Complex>& ring) {
    std::vector<Complex> m;
    m.reserve(ring.size());
    for (auto it = ring.rbegin(); it != ring.rend(); ++it)
      m.push_back({-it->real(), it->imag()});
    return m;
  };
  for (const auto& s : r.shells) out.shells.push_back(flip(s));
  for (const auto& h : r.holes) out.holes.push_back(flip(h));
  return out;
}

Region level_region(const AnalyticMap& f, double r, double tol, Side side) {
  Region reg = region_from_polyline(trace_level_curve(f, r, tol));
  if (side == Side::Negative) reg = reflect_region(reg);
  return reg;
}

/*---------------------------------------------------------------------------
 * SlabCell helpers
 *---------------------------------------------------------------------------*/

Interval SlabCell::window_at(double u) const {
  Interval acc;
  const double slack = 1e-12 * (std::abs(u) + 1.0);
  bool any = false;
  for (const auto& p : parts) {
    if (u < p.u0 - slack || u > p.u1 + slack) continue;
    const Interval iv = p.at(u);
    if (!any) {
      acc = iv;
      any = true;
    } else {
      acc.lo = std::min(acc.lo, iv.lo);
      acc.hi = std::max(acc.hi, iv.hi);
    }
  }
  return any ? acc : Interval{};
}

std::vector<Interval> SlabCell::parts_at(double u) const {
  std::vector<Interval> out;
  if (parts.empty()) return out;
  const double slack = 1e-12 * (std::abs(u) + 1.0);
  // parts sorted by u0: binary search the covering u0-group
  std::size_t lo = 0, hi = parts.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (parts[mid].u0 <= u)
      lo = mid + 1;
    else
      hi = mid;
  }
  std::size_t gi = lo == 0 ? 0 : lo - 1;
  const double g0 = parts[gi].u0;
  while (gi > 0 && parts[gi - 1].u0 == g0) --gi;
  for (std::size_t pi = gi; pi < parts.size() && parts[pi].u0 == g0; ++pi) {
    const auto& p = parts[pi];
    if (u < p.u0 - slack || u > p.u1 + slack) continue;
    out.push_back(p.at(u));
  }
  return out;
}

double SlabCell::area() const {
  double acc = 0.0;
  for (const auto& p : parts) acc += p.area();
  return acc;
}

Polyline SlabCell::polygon() const {
  Polyline poly;
  poly.closed = true;
  if (parts.empty()) return poly;
  std::vector<Complex> lower, upper;
  for (const auto& p : parts) {
    lower.push_back({p.u0, p.left.lo});
    lower.push_back({p.u1, p.right.lo});
    upper.push_back({p.u0, p.left.hi});
    upper.push_back({p.u1, p.right.hi});
  }
  for (const auto& q : lower) poly.pts.push_back(q);
  for (auto it = upper.rbegin(); it != upper.rend(); ++it)
    poly.pts.push_back(*it);
  return poly;
}

int Decomposition::slab_of(double u) const {
  if (line_u.size() < 2) return -1;
  if (u < line_u.front() - snap || u > line_u.back() + snap) return -1;
  auto it = std::upper_bound(line_u.begin(), line_u.end(), u);
  int s = (int)(it - line_u.begin()) - 1;
  return std::clamp(s, 0, (int)line_u.size() - 2);
}

const SlabCell* Decomposition::cell_at(double u, double v) const {
  const int s = slab_of(u);
  if (s < 0) return nullptr;
  const SlabCell* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (int id : slab_faces[(std::size_t)s]) {
    const Interval w = cells[(std::size_t)id].window_at(u);
    if (w.empty()) continue;
    const double d = v < w.lo ? w.lo - v : (v > w.hi ? v - w.hi : 0.0);
    if (d < best_d) {
      best_d = d;
      best = &cells[(std::size_t)id];
    }
  }
  return (best && best_d <= 64.0 * snap) ? best : nullptr;
}

/*---------------------------------------------------------------------------
 * Decomposition
 *---------------------------------------------------------------------------*/

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) {
    while (p[(std::size_t)a] != a) {
      p[(std::size_t)a] = p[(std::size_t)p[(std::size_t)a]];
      a = p[(std::size_t)a];
    }
    return a;
  }
  void unite(int a, int b) { p[(std::size_t)find(a)] = find(b); }
};

struct SubIv {
  int slab;
  double u0, u1;
};

struct Cellette {
  int slab;
  double u0, u1;
  Interval left, right;
};

// Extrapolates the 1/3 and 2/3 interval samples to the sub-interval ends
// (section boundaries are linear between vertex abscissas).
Cellette make_cellette(int slab, double u0, double u1, const Interval& A,
                       const Interval& B) {
  Cellette c{slab, u0, u1, {}, {}};
  c.left = {2.0 * A.lo - B.lo, 2.0 * A.hi - B.hi};
  c.right = {2.0 * B.lo - A.lo, 2.0 * B.hi - A.hi};
  if (c.left.hi < c.left.lo) c.left = {c.left.mid(), c.left.mid()};
  if (c.right.hi < c.right.lo) c.right = {c.right.mid(), c.right.mid()};
  return c;
}

void emit_cellettes(const Region& reg, int slab, double u0, double u1,
                    std::vector<Interval> A, std::vector<Interval> B,
                    int depth, std::vector<Cellette>& out) {
  if (A.size() == B.size()) {
    for (std::size_t i = 0; i < A.size(); ++i)
      out.push_back(make_cellette(slab, u0, u1, A[i], B[i]));
    return;
  }
  if (depth >= 6) {
    // Persistent mismatch at rounding scale: drop slivers and pair by order.
    const double diam = bounding_box(reg).diameter();
    auto prune = [&](std::vector<Interval>& v) {
      std::vector<Interval> keep;
      for (const auto& iv : v)
        if (iv.length() > 1e-10 * diam) keep.push_back(iv);
      v = keep;
    };
    prune(A);
    prune(B);
    if (A.size() != B.size())
      throw EvalError("sub-slab interval count mismatch persists near u = " +
                      std::to_string(u0));
    for (std::size_t i = 0; i < A.size(); ++i)
      out.push_back(make_cellette(slab, u0, u1, A[i], B[i]));
    return;
  }
  const double mid = 0.5 * (u0 + u1);
  const double wl = mid - u0, wr = u1 - mid;
  const auto sl0 = vertical_cross_section(reg, u0 + wl / 3.0).intervals;
  const auto sl1 = vertical_cross_section(reg, u0 + 2.0 * wl / 3.0).intervals;
  const auto sr0 = vertical_cross_section(reg, mid + wr / 3.0).intervals;
  const auto sr1 = vertical_cross_section(reg, mid + 2.0 * wr / 3.0).intervals;
  emit_cellettes(reg, slab, u0, mid, sl0, sl1, depth + 1, out);
  emit_cellettes(reg, slab, mid, u1, sr0, sr1, depth + 1, out);
}

}  // namespace

Decomposition decompose(const Region& R_rho, const LineSystem& lines,
                        Side side) {
  Decomposition dec;
  dec.side = side;
  dec.region_work = side == Side::Negative ? reflect_region(R_rho) : R_rho;
  const Region& reg = dec.region_work;
  if (!region_contains(reg, {0.0, 0.0}))
    throw OriginOutside("w = 0 is not interior to the level region");
  const BBox bb = bounding_box(reg);
  dec.snap = reg.snap_tol > 0.0 ? reg.snap_tol : 1e-9 * bb.diameter();

  // Cut abscissas: u = 0 first, then the system lines on the working side.
  std::vector<double> cuts{0.0};
  for (double u : lines.u_values) {
    const double w = side == Side::Negative ? -u : u;
    if (w > dec.snap) cuts.push_back(w);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> dedup;
  for (double c : cuts)
    if (dedup.empty() || c - dedup.back() > dec.snap) dedup.push_back(c);
  if (dedup.back() < bb.xhi - dec.snap) dedup.push_back(bb.xhi + 2.0 * dec.snap);
  dec.line_u = std::move(dedup);
  const int nslab = (int)dec.line_u.size() - 1;
  if (nslab < 1) throw DomainError("line system covers no positive-side slab");

  // Vertex events inside the working half.
  const double exact = 1e-12 * std::max(bb.diameter(), 1e-30);
  std::vector<double> events;
  {
    std::vector<double> xs;
    for (const auto& s : reg.shells)
      for (const auto& p : s) xs.push_back(p.real());
    for (const auto& h : reg.holes)
      for (const auto& p : h) xs.push_back(p.real());
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
      if (x <= dec.snap || x >= dec.line_u.back() - dec.snap) continue;
      if (events.empty() || x - events.back() > exact) events.push_back(x);
    }
  }

  // Sub-intervals: slabs split at vertex events.
  std::vector<SubIv> subs;
  {
    std::size_t ei = 0;
    for (int s = 0; s < nslab; ++s) {
      double u0 = dec.line_u[(std::size_t)s];
      const double u1 = dec.line_u[(std::size_t)s + 1];
      while (ei < events.size() && events[ei] <= u0 + exact) ++ei;
      std::size_t e = ei;
      while (e < events.size() && events[e] < u1 - exact) {
        subs.push_back({s, u0, events[e]});
        u0 = events[e];
        ++e;
      }
      subs.push_back({s, u0, u1});
    }
  }

  // Two interior samples per sub-interval, one global sweep.
  std::vector<double> queries;
  queries.reserve(2 * subs.size());
  for (const auto& si : subs) {
    const double w = si.u1 - si.u0;
    queries.push_back(si.u0 + w / 3.0);
    queries.push_back(si.u0 + 2.0 * w / 3.0);
  }
  const auto sections = vertical_cross_sections(reg, queries);

  std::vector<Cellette> cellettes;
  for (std::size_t i = 0; i < subs.size(); ++i)
    emit_cellettes(reg, subs[i].slab, subs[i].u0, subs[i].u1,
                   sections[2 * i].intervals, sections[2 * i + 1].intervals, 0,
                   cellettes);
  std::sort(cellettes.begin(), cellettes.end(),
            [](const Cellette& a, const Cellette& b) {
              if (a.slab != b.slab) return a.slab < b.slab;
              if (a.u0 != b.u0) return a.u0 < b.u0;
              return a.left.lo < b.left.lo;
            });

  // Glue cellettes into faces per slab.  Sorted by (slab, u0), cellettes
  // fall into u0-groups; only consecutive groups can share a cut.
  UnionFind uf((int)cellettes.size());
  {
    std::size_t i = 0;
    while (i < cellettes.size()) {
      std::size_t j = i;
      while (j < cellettes.size() && cellettes[j].slab == cellettes[i].slab &&
             std::abs(cellettes[j].u0 - cellettes[i].u0) <= exact)
        ++j;
      // [i, j) is one group; [j, ...) starts the next within the same slab.
      std::size_t k = j;
      while (k < cellettes.size() && cellettes[k].slab == cellettes[i].slab &&
             std::abs(cellettes[k].u0 - cellettes[j].u0) <= exact)
        ++k;
      if (j < cellettes.size() && cellettes[j].slab == cellettes[i].slab &&
          std::abs(cellettes[j].u0 - cellettes[i].u1) <= exact) {
        for (std::size_t p = i; p < j; ++p)
          for (std::size_t q = j; q < k; ++q)
            if (Interval::overlap(cellettes[p].right, cellettes[q].left) >
                dec.snap)
              uf.unite((int)p, (int)q);
      }
      i = j;
    }
  }

  // Materialize cells.
  std::map<int, int> root_to_cell;
  dec.slab_faces.assign((std::size_t)nslab, {});
  for (std::size_t i = 0; i < cellettes.size(); ++i) {
    const int root = uf.find((int)i);
    auto it = root_to_cell.find(root);
    int cid;
    if (it == root_to_cell.end()) {
      cid = (int)dec.cells.size();
      root_to_cell.emplace(root, cid);
      SlabCell c;
      c.id = cid;
      c.slab = cellettes[i].slab;
      c.a = dec.line_u[(std::size_t)c.slab];
      c.b = dec.line_u[(std::size_t)c.slab + 1];
      dec.cells.push_back(std::move(c));
      dec.slab_faces[(std::size_t)cellettes[i].slab].push_back(cid);
    } else {
      cid = it->second;
    }
    dec.cells[(std::size_t)cid].parts.push_back(
        {cellettes[i].u0, cellettes[i].u1, cellettes[i].left,
         cellettes[i].right});
  }
  for (auto& c : dec.cells) {
    std::sort(c.parts.begin(), c.parts.end(),
              [](const CellPart& x, const CellPart& y) {
                if (x.u0 != y.u0) return x.u0 < y.u0;
                return x.left.lo < y.left.lo;
              });
    // Wall continua: hulls of the parts that touch the bounding lines.
    Interval va, vb;
    bool any_a = false, any_b = false;
    for (const auto& p : c.parts) {
      if (std::abs(p.u0 - c.a) <= exact) {
        if (!any_a) {
          va = p.left;
          any_a = true;
        } else {
          va.lo = std::min(va.lo, p.left.lo);
          va.hi = std::max(va.hi, p.left.hi);
        }
      }
      if (std::abs(p.u1 - c.b) <= exact) {
        if (!any_b) {
          vb = p.right;
          any_b = true;
        } else {
          vb.lo = std::min(vb.lo, p.right.lo);
          vb.hi = std::max(vb.hi, p.right.hi);
        }
      }
    }
    c.alpha = {c.a, any_a ? va : Interval{}};
    c.beta = {c.b, any_b ? vb : Interval{}};
  }

  // Origin cell: face of slab 0 whose left wall interval spans v = 0.
  for (int cid : dec.slab_faces.empty() ? std::vector<int>{}
                                        : dec.slab_faces[0]) {
    const auto& al = dec.cells[(std::size_t)cid].alpha.v;
    if (al.empty()) continue;
    if (al.lo - 16.0 * dec.snap <= 0.0 && 0.0 <= al.hi + 16.0 * dec.snap) {
      dec.origin_cell = cid;
      break;
    }
  }

  // Rightward reachability over wall overlaps.
  if (dec.origin_cell >= 0) {
    std::deque<int> q{dec.origin_cell};
    dec.cells[(std::size_t)dec.origin_cell].reachable = true;
    while (!q.empty()) {
      const int cid = q.front();
      q.pop_front();
      const SlabCell& c = dec.cells[(std::size_t)cid];
      if (c.slab + 1 >= nslab) continue;
      if (c.beta.v.empty()) continue;
      for (int nid : dec.slab_faces[(std::size_t)c.slab + 1]) {
        SlabCell& n = dec.cells[(std::size_t)nid];
        if (n.reachable || n.alpha.v.empty()) continue;
        const Interval ov = Interval::intersect(c.beta.v, n.alpha.v);
        if (ov.length() <= dec.snap) continue;
        n.reachable = true;
        n.pred = cid;
        n.passage = ov;
        q.push_back(nid);
      }
    }
  }
  return dec;
}

/*---------------------------------------------------------------------------
 * r(D) and ordering
 *---------------------------------------------------------------------------*/

std::vector<double> default_r_grid(double rho) {
  std::vector<double> g(64);
  const double lo = 0.01;
  for (int k = 0; k < 64; ++k)
    g[(std::size_t)k] = lo * std::pow(rho / lo, (double)k / 63.0);
  g.back() = rho;
  return g;
}

namespace {

class UmaxCache {
 public:
  UmaxCache(const AnalyticMap& f, bool negate) : f_(&f), negate_(negate) {}
  double operator()(double r) {
    auto it = memo_.find(r);
    if (it != memo_.end()) return it->second;
    const double v = max_real_on_circle(*f_, r, negate_);
    memo_.emplace(r, v);
    return v;
  }

 private:
  const AnalyticMap* f_;
  bool negate_;
  std::map<double, double> memo_;
};

// A vertical line u = c meets closed B(r) iff umin(r) <= c <= umax(r).
// Working-side cells have 0 <= a < b and umin(r) <= 0 < a, so the binding
// abscissa among all lines touching [a, b] is b itself.
double r_of_cell(const SlabCell& cell, UmaxCache& umax, double rho,
                 const std::vector<double>& r_grid) {
  const double target = cell.b;
  const double tol = 1e-9 * std::max(1.0, std::abs(target));
  const auto meets = [&](double r) { return umax(r) >= target - tol; };
  std::size_t first = r_grid.size();
  {
    std::size_t lo = 0, hi = r_grid.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (meets(r_grid[mid]))
        hi = mid;
      else
        lo = mid + 1;
    }
    first = lo;
  }
  if (first == r_grid.size()) return rho;
  double hi = r_grid[first];
  double lo = first == 0 ? std::min(1e-6, hi * 0.5) : r_grid[first - 1];
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (meets(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

double compute_r_of_D(const SlabCell& cell, const AnalyticMap& f, Side side,
                      double rho, const std::vector<double>& r_grid) {
  UmaxCache umax(f, side == Side::Negative);
  return r_of_cell(cell, umax, rho, r_grid);
}

void assign_r_and_order(Decomposition& dec, const AnalyticMap& f, double rho) {
  dec.rho = rho;
  const auto grid = default_r_grid(rho);
  UmaxCache umax(f, dec.side == Side::Negative);
  for (auto& c : dec.cells) c.r_of_D = r_of_cell(c, umax, rho, grid);

  if (dec.origin_cell < 0)
    throw NoOriginCell("no slab face holds w = 0 on its left wall");

  std::vector<int> rest;
  for (const auto& c : dec.cells)
    if (c.reachable && c.id != dec.origin_cell) rest.push_back(c.id);
  std::sort(rest.begin(), rest.end(), [&](int x, int y) {
    const SlabCell& cx = dec.cells[(std::size_t)x];
    const SlabCell& cy = dec.cells[(std::size_t)y];
    if (cx.r_of_D != cy.r_of_D) return cx.r_of_D < cy.r_of_D;
    if (cx.a != cy.a) return cx.a < cy.a;
    const double vx = cx.alpha.v.empty() ? 0.0 : cx.alpha.v.lo;
    const double vy = cy.alpha.v.empty() ? 0.0 : cy.alpha.v.lo;
    return vx < vy;
  });
  dec.ordered.clear();
  dec.ordered.push_back(dec.origin_cell);
  for (int id : rest) dec.ordered.push_back(id);
  for (auto& c : dec.cells) c.order = -1;
  for (std::size_t i = 0; i < dec.ordered.size(); ++i)
    dec.cells[(std::size_t)dec.ordered[i]].order = (int)i + 1;
}

Polyline monotone_access_curve(const Decomposition& dec, int cell_id) {
  if (cell_id < 0 || cell_id >= (int)dec.cells.size())
    throw DomainError("bad cell id");
  std::vector<int> path;
  for (int c = cell_id; c >= 0; c = dec.cells[(std::size_t)c].pred)
    path.push_back(c);
  std::reverse(path.begin(), path.end());
  Polyline out;
  out.pts.push_back({0.0, 0.0});
  for (std::size_t i = 1; i < path.size(); ++i) {
    const SlabCell& c = dec.cells[(std::size_t)path[i]];
    out.pts.push_back({c.a, c.passage.mid()});
  }
  const SlabCell& last = dec.cells[(std::size_t)cell_id];
  const double um = 0.5 * (last.a + last.b);
  const Interval w = last.window_at(um);
  if (!w.empty()) out.pts.push_back({um, w.mid()});
  return out;
}

/*---------------------------------------------------------------------------
 * Proposition 1
 *---------------------------------------------------------------------------*/

Prop1Report check_prop1(const Decomposition& dec, const Region& Br_work) {
  Prop1Report rep;
  const double tol_contact =
      std::max(dec.snap, Br_work.snap_tol > 0.0 ? Br_work.snap_tol : 0.0);

  // Sample abscissas per cell and one global batched sweep over B(r).
  std::vector<double> all_us;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // per-cell range
  std::vector<const SlabCell*> checked;
  for (const auto& c : dec.cells) {
    if (!c.reachable) continue;
    std::vector<double> us{c.a, c.b};
    for (const auto& p : c.parts) {
      us.push_back(p.u0);
      us.push_back(p.u1);
      us.push_back(0.5 * (p.u0 + p.u1));
    }
    for (int g = 1; g < 8; ++g)
      us.push_back(c.a + (c.b - c.a) * (double)g / 8.0);
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end(),
                         [&](double x, double y) {
                           return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x));
                         }),
             us.end());
    spans.emplace_back(all_us.size(), us.size());
    checked.push_back(&c);
    all_us.insert(all_us.end(), us.begin(), us.end());
  }
  const auto secs = vertical_cross_sections(Br_work, all_us);

  for (std::size_t ci = 0; ci < checked.size(); ++ci) {
    const SlabCell& c = *checked[ci];
    const auto [off, cnt] = spans[ci];
    // Parts are sorted by u0; a sample is covered by one u0-group (plus its
    // left neighbour exactly at a shared cut, whose walls coincide there).
    std::vector<double> u0s;
    u0s.reserve(c.parts.size());
    for (const auto& p : c.parts) u0s.push_back(p.u0);
    std::vector<char> meets(cnt, 0);
    for (std::size_t s = 0; s < cnt; ++s) {
      const double u = all_us[off + s];
      const auto& sec = secs[off + s];
      auto it = std::upper_bound(u0s.begin(), u0s.end(), u);
      std::size_t gi = it == u0s.begin() ? 0 : (std::size_t)(it - u0s.begin()) - 1;
      const double g0 = u0s[gi];
      while (gi > 0 && u0s[gi - 1] == g0) --gi;
      for (std::size_t pi = gi; pi < c.parts.size() && u0s[pi] == g0; ++pi) {
        const auto& p = c.parts[pi];
        if (u < p.u0 - 1e-12 || u > p.u1 + 1e-12) continue;
        const Interval w = p.at(u);
        for (const auto& iv : sec.intervals) {
          const double gap = std::max(w.lo - iv.hi, iv.lo - w.hi);
          if (gap <= tol_contact) {
            meets[s] = 1;
            break;
          }
        }
        if (meets[s]) break;
      }
    }
    ++rep.cells_checked;
    std::size_t last_true = cnt;
    for (std::size_t s = 0; s < cnt; ++s)
      if (meets[s]) last_true = s;
    if (last_true == cnt) continue;  // B(r) misses the cell entirely
    for (std::size_t s = 0; s < last_true; ++s) {
      if (meets[s]) continue;
      ++rep.violations;
      if (rep.items.size() < 32)
        rep.items.push_back(
            {c.id, all_us[off + s], all_us[off + last_true]});
    }
    if (meets[0] && !meets[cnt - 1]) ++rep.boundary_cells;
  }
  return rep;
}

/*---------------------------------------------------------------------------
 * Proposition 2 (the chained section inequality)
 *---------------------------------------------------------------------------*/

std::vector<Prop2Result> check_prop2_all(const Decomposition& dec,
                                         const Region& Br_work) {
  const std::size_t n = dec.ordered.size();
  std::vector<Prop2Result> out;
  if (n == 0) return out;

  std::vector<double> us;
  us.reserve(2 * n);
  for (int id : dec.ordered) {
    us.push_back(dec.cells[(std::size_t)id].alpha.u);
    us.push_back(dec.cells[(std::size_t)id].beta.u);
  }
  const auto secs = vertical_cross_sections(Br_work, us);

  std::vector<double> mesA(n, 0.0), mesB(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const SlabCell& c = dec.cells[(std::size_t)dec.ordered[m]];
    if (!c.alpha.v.empty()) mesA[m] = secs[2 * m].overlap(c.alpha.v);
    if (!c.beta.v.empty()) mesB[m] = secs[2 * m + 1].overlap(c.beta.v);
  }
  // Suffix sums: lhs_k = sum_{m>=k} mesB, rhs_k = sum_{m>k} mesA (1-based).
  std::vector<double> sufB(n + 1, 0.0), sufA(n + 1, 0.0);
  for (std::size_t m = n; m-- > 0;) {
    sufB[m] = sufB[m + 1] + mesB[m];
    sufA[m] = sufA[m + 1] + mesA[m];
  }
  out.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k].k = (int)k + 1;
    out[k].lhs = sufB[k];
    out[k].rhs = sufA[k + 1];
    out[k].holds = out[k].lhs <= out[k].rhs + 1e-9;
  }
  return out;
}

Prop2Result check_prop2(const Decomposition& dec, const Region& Br_work,
                        int k) {
  const auto all = check_prop2_all(dec, Br_work);
  if (k < 1 || (std::size_t)k > all.size())
    throw DomainError("prop2 index k out of range");
  return all[(std::size_t)k - 1];
}

}  // namespace vertcover
