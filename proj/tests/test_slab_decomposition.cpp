#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "vertcover/analytic_map.hpp"
#include "vertcover/errors.hpp"
#include "vertcover/region_ops.hpp"
#include "vertcover/slab.hpp"

using namespace vertcover;

namespace {

// mpmath, 30 digits
constexpr double kHalfLn19 = 1.472219489583220230004513715944;
constexpr double kHalfLn3 = 0.549306144334054845697622618462;

Region rect_region(double x0, double x1, double y0, double y1) {
  Polyline p;
  p.closed = true;
  p.pts = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return region_from_polyline(p);
}

// Bottom arm, right arm, and a returning top arm.  Cells in the top arm
// left of the right arm are inside the region but cannot be reached by
// {right, up, down} staircase moves from the origin.
Region hook_region() {
  Polyline p;
  p.closed = true;
  p.pts = {{-0.2, -0.2}, {2.2, -0.2}, {2.2, 2.2}, {0.5, 2.2},
           {0.5, 1.8},   {1.8, 1.8},  {1.8, 0.2}, {-0.2, 0.2}};
  return region_from_polyline(p);
}

LineSystem manual_lines(std::vector<double> us) {
  LineSystem ls;
  std::sort(us.begin(), us.end());
  ls.u_values = std::move(us);
  ls.includes_tangents = false;
  for (std::size_t i = 0; i + 1 < ls.u_values.size(); ++i)
    ls.delta = std::max(ls.delta, ls.u_values[i + 1] - ls.u_values[i]);
  return ls;
}

// Exact area of region ∩ slab: the section measure is piecewise linear in u
// between vertex abscissas, so 2-point Gauss per vertex gap integrates it
// exactly.  Entirely independent of the decomposition path.
double slab_mass(const Region& reg, double a, double b) {
  std::vector<double> knots{a, b};
  for (const auto& s : reg.shells)
    for (const auto& q : s)
      if (q.real() > a + 1e-13 && q.real() < b - 1e-13)
        knots.push_back(q.real());
  for (const auto& h : reg.holes)
    for (const auto& q : h)
      if (q.real() > a + 1e-13 && q.real() < b - 1e-13)
        knots.push_back(q.real());
  std::sort(knots.begin(), knots.end());
  const double g = 0.5 / std::sqrt(3.0);
  std::vector<double> nodes;
  std::vector<double> w;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double h = knots[i + 1] - knots[i];
    if (h <= 1e-13) continue;
    const double m = 0.5 * (knots[i] + knots[i + 1]);
    nodes.push_back(m - g * h);
    nodes.push_back(m + g * h);
    w.push_back(0.5 * h);
    w.push_back(0.5 * h);
  }
  const auto secs = vertical_cross_sections(reg, nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    acc += w[i] * secs[i].measure();
  return acc;
}

double faces_mass(const Decomposition& dec, int slab) {
  double acc = 0.0;
  for (int id : dec.slab_faces[(std::size_t)slab])
    acc += dec.cells[(std::size_t)id].area();
  return acc;
}

}  // namespace

TEST_CASE("line system: strip has exactly the two extreme tangents") {
  const auto f = catalog_map("strip");
  const auto ls = build_line_system(f, 0.9, 0.1);
  REQUIRE(ls.includes_tangents);
  REQUIRE(ls.tangent_us.size() == 2);
  CHECK(ls.tangent_us[0] == doctest::Approx(-kHalfLn19).epsilon(1e-9));
  CHECK(ls.tangent_us[1] == doctest::Approx(kHalfLn19).epsilon(1e-9));

  REQUIRE(ls.u_values.size() >= 2);
  CHECK(std::is_sorted(ls.u_values.begin(), ls.u_values.end()));
  for (std::size_t i = 0; i + 1 < ls.u_values.size(); ++i)
    CHECK(ls.u_values[i + 1] - ls.u_values[i] > 0.0);
  CHECK(ls.delta <= 0.1 + 1e-12);
  CHECK(ls.u_values.front() == doctest::Approx(-kHalfLn19).epsilon(1e-8));
  CHECK(ls.u_values.back() == doctest::Approx(kHalfLn19).epsilon(1e-8));
  // every tangent abscissa appears among the lines
  for (double t : ls.tangent_us) {
    double best = 1e9;
    for (double u : ls.u_values) best = std::min(best, std::abs(u - t));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("line system: koebe at r = 1/2 has three distinct tangent abscissas") {
  const auto f = catalog_map("koebe");
  const auto ls = build_line_system(f, 0.5, 0.25);
  // vertical tangents at u = 2 (phi = 0), u = -25/72 (an off-axis pair),
  // and u = -2/9 (phi = pi); the off-axis pair shares one abscissa
  REQUIRE(ls.tangent_us.size() == 3);
  CHECK(ls.tangent_us[0] == doctest::Approx(-25.0 / 72.0).epsilon(1e-9));
  CHECK(ls.tangent_us[1] == doctest::Approx(-2.0 / 9.0).epsilon(1e-9));
  CHECK(ls.tangent_us[2] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("line system: halving delta halves the realized gap") {
  const auto f = catalog_map("strip");
  const auto c = build_line_system(f, 0.9, 0.2);
  const auto h = build_line_system(f, 0.9, 0.1);
  CHECK(h.delta <= 0.55 * c.delta);
  CHECK(h.delta >= 0.25 * c.delta);
  CHECK(h.u_values.size() > c.u_values.size());
}

TEST_CASE("line system: rejects bad radius and pitch") {
  const auto f = catalog_map("strip");
  CHECK_THROWS_AS(build_line_system(f, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(build_line_system(f, 0.5, 0.0), DomainError);
}

TEST_CASE("decompose: strip gives a single chained face per slab") {
  const auto f = catalog_map("strip");
  const Region reg = level_region(f, 0.9, 1e-3);
  const auto ls = build_line_system(f, 0.9, 0.15);
  const auto dec = decompose(reg, ls, Side::Positive);

  REQUIRE(dec.line_u.size() >= 3);
  CHECK(dec.line_u.front() == 0.0);
  REQUIRE(dec.slab_faces.size() + 1 == dec.line_u.size());
  for (const auto& faces : dec.slab_faces) CHECK(faces.size() == 1);
  for (const auto& c : dec.cells) {
    CHECK(c.reachable);
    CHECK_FALSE(c.alpha.v.empty());
  }
  REQUIRE(dec.origin_cell >= 0);
  CHECK(dec.cells[(std::size_t)dec.origin_cell].slab == 0);

  // consecutive walls coincide: beta of slab k equals alpha of slab k+1
  for (std::size_t s = 0; s + 1 < dec.slab_faces.size(); ++s) {
    const auto& L = dec.cells[(std::size_t)dec.slab_faces[s][0]];
    const auto& R = dec.cells[(std::size_t)dec.slab_faces[s + 1][0]];
    REQUIRE_FALSE(L.beta.v.empty());
    REQUIRE_FALSE(R.alpha.v.empty());
    CHECK(L.beta.u == doctest::Approx(R.alpha.u).epsilon(1e-12));
    CHECK(L.beta.v.lo == doctest::Approx(R.alpha.v.lo).epsilon(1e-9));
    CHECK(L.beta.v.hi == doctest::Approx(R.alpha.v.hi).epsilon(1e-9));
    CHECK(R.passage.length() > 0.0);
  }
}

TEST_CASE("decompose: faces partition the half-region exactly") {
  const auto f = catalog_map("strip");
  const Region reg = level_region(f, 0.9, 1e-3);
  const auto ls = build_line_system(f, 0.9, 0.15);
  const auto dec = decompose(reg, ls, Side::Positive);

  double total = 0.0;
  for (std::size_t s = 0; s + 1 < dec.line_u.size(); ++s) {
    const double mass = slab_mass(dec.region_work, dec.line_u[s],
                                  dec.line_u[s + 1]);
    const double faces = faces_mass(dec, (int)s);
    CHECK(faces == doctest::Approx(mass).epsilon(1e-8));
    total += faces;
  }
  // the strip region is symmetric, so the positive half carries half the area
  CHECK(total == doctest::Approx(0.5 * region_area(dec.region_work))
                     .epsilon(1e-8));
}

TEST_CASE("decompose: koebe negative side has pocket faces and still partitions") {
  const auto f = catalog_map("koebe");
  const Region reg = level_region(f, 0.8, 1e-3);
  const auto ls = build_line_system(f, 0.8, 0.2);
  const auto dec = decompose(reg, ls, Side::Negative);

  std::size_t max_faces = 0;
  for (const auto& faces : dec.slab_faces)
    max_faces = std::max(max_faces, faces.size());
  CHECK(max_faces >= 2);  // the curve folds over near the slit side

  for (std::size_t s = 0; s + 1 < dec.line_u.size(); ++s) {
    const double mass = slab_mass(dec.region_work, dec.line_u[s],
                                  dec.line_u[s + 1]);
    CHECK(faces_mass(dec, (int)s) == doctest::Approx(mass).epsilon(1e-8));
  }
  for (const auto& c : dec.cells) CHECK(c.reachable);
}

TEST_CASE("decompose: origin must be interior") {
  const Region reg = rect_region(0.5, 2.0, -1.0, 1.0);
  CHECK_THROWS_AS(decompose(reg, manual_lines({1.0, 1.5, 2.0}),
                            Side::Positive),
                  OriginOutside);
}

TEST_CASE("decompose: hook corridor leaves the returning arm unreachable") {
  const Region reg = hook_region();
  const auto ls = manual_lines(
      {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.8, 2.0, 2.25});
  const auto dec = decompose(reg, ls, Side::Positive);

  double total = 0.0;
  int unreachable = 0;
  for (const auto& c : dec.cells) {
    total += c.area();
    if (!c.reachable) ++unreachable;
  }
  // hook area right of u = 0 (bottom arm loses its 0.2 x 0.4 left stub)
  CHECK(total == doctest::Approx(2.2).epsilon(1e-9));
  // one top-arm face per slab between u = 0.5 and u = 1.8
  CHECK(unreachable == 6);
  for (const auto& c : dec.cells)
    if (!c.reachable) {
      CHECK(c.a >= 0.5 - 1e-9);
      CHECK(c.b <= 1.8 + 1e-9);
      CHECK(c.alpha.v.lo > 1.0);  // it is the top arm
    }
}

TEST_CASE("decompose: face reachability agrees with a grid staircase oracle") {
  const Region reg = hook_region();
  const auto ls = manual_lines(
      {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.8, 2.0, 2.25});
  const auto dec = decompose(reg, ls, Side::Positive);
  const ReachGrid grid = monotone_reachable_grid(reg, 0.0625);

  int compared = 0;
  for (const auto& c : dec.cells)
    for (const auto& p : c.parts) {
      const double u = 0.5 * (p.u0 + p.u1);
      const Interval w = p.at(u);
      const double v = w.mid();
      const int j = grid.col_of(u), i = grid.row_of(v);
      if (!grid.cell_inside(j, i)) continue;
      CHECK(grid.cell_reached(j, i) == c.reachable);
      ++compared;
    }
  CHECK(compared >= 12);
}

TEST_CASE("monotone access curve stays inside and marches right") {
  const Region reg = hook_region();
  const auto ls = manual_lines(
      {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.8, 2.0, 2.25});
  const auto dec = decompose(reg, ls, Side::Positive);

  int target = -1;
  for (const auto& c : dec.cells)
    if (c.reachable && (target < 0 || c.a > dec.cells[(std::size_t)target].a))
      target = c.id;
  REQUIRE(target >= 0);
  const Polyline path = monotone_access_curve(dec, target);
  REQUIRE(path.pts.size() >= 2);
  CHECK(path.pts.front() == Complex{0.0, 0.0});
  for (std::size_t i = 0; i + 1 < path.pts.size(); ++i)
    CHECK(path.pts[i + 1].real() >= path.pts[i].real() - 1e-12);
  for (std::size_t i = 1; i < path.pts.size(); ++i)
    CHECK(region_contains(reg, path.pts[i]));
}

TEST_CASE("r(D): minimal disk radius meeting every line through a cell") {
  const auto f = catalog_map("strip");
  const Region reg = level_region(f, 0.9, 1e-3);
  const auto ls = build_line_system(f, 0.9, 0.15);
  auto dec = decompose(reg, ls, Side::Positive);
  assign_r_and_order(dec, f, 0.9);

  for (const auto& c : dec.cells) {
    CHECK(c.r_of_D > 0.0);
    CHECK(c.r_of_D <= 0.9 + 1e-12);
    // independent check: the image of the r(D)-disk must reach b, and a
    // slightly smaller disk must not (up to the bisection step)
    CHECK(max_real_on_circle(f, c.r_of_D) >= c.b - 1e-6);
    if (c.r_of_D > 2e-4 && c.r_of_D < 0.9 - 1e-12)
      CHECK(max_real_on_circle(f, c.r_of_D - 2e-4) < c.b);
  }

  const auto& first = dec.cells[(std::size_t)dec.origin_cell];
  for (const auto& c : dec.cells) CHECK(first.r_of_D <= c.r_of_D + 1e-12);

  // rightmost cell needs nearly the full level radius
  double rmax = 0.0, bmax = 0.0;
  for (const auto& c : dec.cells)
    if (c.b > bmax) {
      bmax = c.b;
      rmax = c.r_of_D;
    }
  CHECK(rmax == doctest::Approx(0.9).epsilon(5e-4));

  // r(D) grows along the chain; orders are 1..n with the origin first
  REQUIRE(dec.ordered.size() == dec.cells.size());
  CHECK(dec.ordered.front() == dec.origin_cell);
  for (std::size_t i = 0; i < dec.ordered.size(); ++i)
    CHECK(dec.cells[(std::size_t)dec.ordered[i]].order == (int)i + 1);
  for (std::size_t i = 0; i + 1 < dec.ordered.size(); ++i) {
    const auto& x = dec.cells[(std::size_t)dec.ordered[i]];
    const auto& y = dec.cells[(std::size_t)dec.ordered[i + 1]];
    CHECK(x.r_of_D <= y.r_of_D + 1e-12);
  }

  // the standalone entry point matches the batch assignment
  const double lone = compute_r_of_D(dec.cells[2], f, Side::Positive, 0.9,
                                     default_r_grid(0.9));
  CHECK(lone == doctest::Approx(dec.cells[2].r_of_D).epsilon(1e-12));
}

TEST_CASE("left anchoring: disk images meet cells from the near wall") {
  const auto f = catalog_map("strip");
  const Region reg = level_region(f, 0.9, 1e-3);
  const auto ls = build_line_system(f, 0.9, 0.15);
  auto dec = decompose(reg, ls, Side::Positive);
  const Region br = level_region(f, 0.5, 1e-3);

  const auto rep = check_prop1(dec, br);
  CHECK(rep.cells_checked > 0);
  CHECK(rep.violations == 0);
  CHECK(rep.boundary_cells == 1);  // exactly one cell holds the frontier
}

TEST_CASE("left anchoring holds for the koebe map on both sides") {
  const auto f = catalog_map("koebe");
  const Region reg = level_region(f, 0.8, 1e-3);
  const auto ls = build_line_system(f, 0.8, 0.2);
  for (Side side : {Side::Positive, Side::Negative}) {
    const auto dec = decompose(reg, ls, side);
    const Region br_raw = level_region(f, 0.3, 1e-3);
    const Region br = side == Side::Negative ? reflect_region(br_raw) : br_raw;
    const auto rep = check_prop1(dec, br);
    CHECK(rep.cells_checked > 0);
    CHECK(rep.violations == 0);
  }
}

TEST_CASE("left anchoring: a detached pocket is flagged") {
  // cells over [-0.5, 2] x [-0.5, 0.5]; the probe region floats in the
  // middle slab without touching its left wall
  const Region reg = rect_region(-0.5, 2.0, -0.5, 0.5);
  const auto dec = decompose(reg, manual_lines({0.7, 1.4, 2.1}),
                             Side::Positive);
  const Region probe = rect_region(1.0, 1.2, -0.2, 0.2);
  const auto rep = check_prop1(dec, probe);
  CHECK(rep.violations >= 1);
  REQUIRE_FALSE(rep.items.empty());
  for (const auto& it : rep.items) CHECK(it.u_missing < it.u_meeting);
}

TEST_CASE("chained section inequality holds on the strip") {
  const auto f = catalog_map("strip");
  const Region reg = level_region(f, 0.9, 1e-3);
  const auto ls = build_line_system(f, 0.9, 0.15);
  auto dec = decompose(reg, ls, Side::Positive);
  assign_r_and_order(dec, f, 0.9);
  const Region br = level_region(f, 0.5, 1e-3);

  const auto all = check_prop2_all(dec, br);
  REQUIRE(all.size() == dec.ordered.size());
  for (const auto& r : all) {
    CHECK(r.holds);
    CHECK(r.lhs <= r.rhs + 1e-9);
  }
  // the last beta wall sits at u = umax(0.9), far beyond the probe disk
  CHECK(all.back().lhs == 0.0);
  // terms near the origin are genuinely positive
  CHECK(all.front().lhs > 0.0);
  CHECK(kHalfLn3 < dec.line_u.back());  // probe frontier is interior

  const auto one = check_prop2(dec, br, 1);
  CHECK(one.lhs == all[0].lhs);
  CHECK(one.rhs == all[0].rhs);
  CHECK_THROWS_AS(check_prop2(dec, br, 0), DomainError);
  CHECK_THROWS_AS(check_prop2(dec, br, (int)all.size() + 1), DomainError);
}

TEST_CASE("chained section inequality holds for koebe on the folded side") {
  const auto f = catalog_map("koebe");
  const Region reg = level_region(f, 0.8, 1e-3);
  const auto ls = build_line_system(f, 0.8, 0.2);
  auto dec = decompose(reg, ls, Side::Negative);
  assign_r_and_order(dec, f, 0.8);
  const Region br = reflect_region(level_region(f, 0.3, 1e-3));
  for (const auto& r : check_prop2_all(dec, br)) CHECK(r.holds);
}

TEST_CASE("frontier cell count stays bounded as lines refine") {
  const auto f = catalog_map("strip");
  const Region reg = level_region(f, 0.9, 1e-3);
  const Region br = level_region(f, 0.5, 1e-3);
  std::vector<int> boundary;
  for (double delta : {0.2, 0.1, 0.05}) {
    const auto ls = build_line_system(f, 0.9, delta);
    const auto dec = decompose(reg, ls, Side::Positive);
    const auto rep = check_prop1(dec, br);
    CHECK(rep.violations == 0);
    boundary.push_back(rep.boundary_cells);
  }
  for (std::size_t i = 0; i + 1 < boundary.size(); ++i)
    CHECK(boundary[i + 1] <= boundary[i]);
  CHECK(boundary.back() >= 1);
}

TEST_CASE("slab lookup and windows") {
  const Region reg = hook_region();
  const auto ls = manual_lines({0.5, 1.0, 1.5, 2.0, 2.25});
  const auto dec = decompose(reg, ls, Side::Positive);

  CHECK(dec.slab_of(-0.5) == -1);
  CHECK(dec.slab_of(0.25) == 0);
  CHECK(dec.slab_of(1.25) == 2);
  CHECK(dec.slab_of(5.0) == -1);

  const SlabCell* c = dec.cell_at(0.25, 0.0);
  REQUIRE(c != nullptr);
  CHECK(c->slab == 0);
  const Interval w = c->window_at(0.25);
  CHECK(w.lo == doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(w.hi == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(dec.cell_at(0.25, 1.0) == nullptr);  // inside the notch, no face
}
