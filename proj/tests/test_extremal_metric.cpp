#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "vertcover/analytic_map.hpp"
#include "vertcover/errors.hpp"
#include "vertcover/metric.hpp"
#include "vertcover/region_ops.hpp"
#include "vertcover/transport.hpp"

using namespace vertcover;

namespace {

// mpmath, 30 digits
constexpr double kHalfLn3 = 0.549306144334054845697622618462;
constexpr double kAtanHalf = 0.463647609000806116;
constexpr double kMuHalf = 0.270855652551582636;      // 1/(pi sinh 1)
constexpr double kMuEdgeOne = 0.084607477207573790;   // 1/(pi cosh 2)
constexpr double kLn9Over2Pi = 0.349699152566059778;
constexpr double kLn9Over4Pi = 0.174849576283029889;
constexpr double kLn10Over4Pi = 0.183233899719856935;

// Closed polygon on the image of |z| = r under f, sampled uniformly in the
// circle parameter.  Dense vertices make the polygon length converge to the
// curve length fast enough for 1e-6 comparisons.
Polyline image_polygon(const AnalyticMap& f, double r, int n) {
  Polyline c;
  c.closed = true;
  c.pts.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double ph = 2.0 * kPi * j / n;
    c.pts.push_back(f.eval(std::polar(r, ph)));
  }
  return c;
}

// Open polygon over half the circle parameter, phi in [-pi/2, pi/2].
Polyline half_image_polygon(const AnalyticMap& f, double r, int n) {
  Polyline c;
  c.closed = false;
  c.pts.reserve(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double ph = -0.5 * kPi + kPi * j / n;
    c.pts.push_back(f.eval(std::polar(r, ph)));
  }
  return c;
}

Region rect_region(double x0, double x1, double y0, double y1) {
  Polyline p;
  p.closed = true;
  p.pts = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return region_from_polyline(p);
}

double mu_field(Complex w) { return mu(w); }
double mu_sq(Complex w) {
  const double m = mu(w);
  return m * m;
}

}  // namespace

/*---------------------------------------------------------------------------
 * The strip metric itself
 *---------------------------------------------------------------------------*/

TEST_CASE("mu closed form agrees with the log-derivative form") {
  std::mt19937 gen(20260825u);
  std::uniform_real_distribution<double> du(-2.5, 2.5);
  std::uniform_real_distribution<double> dv(-kPi / 4, kPi / 4);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Complex w{du(gen), dv(gen)};
    if (std::abs(w) < 1e-3) continue;  // stay away from the pole
    const double a = mu(w);
    const double b = mu_via_inverse(w);
    CHECK(std::abs(a - b) <= 1e-12 * a);
    ++checked;
  }
  CHECK(checked > 9900);
}

TEST_CASE("mu frozen values, decay, and domain") {
  CHECK(mu({0.5, 0.0}) == doctest::Approx(kMuHalf).epsilon(1e-14));
  // On the strip edge v = pi/4 the metric reduces to 1/(pi cosh 2u).
  CHECK(mu({1.0, kPi / 4}) == doctest::Approx(kMuEdgeOne).epsilon(1e-14));
  CHECK(mu({0.0, kPi / 4}) == doctest::Approx(1.0 / kPi).epsilon(1e-14));

  // For fixed u != 0 the metric decays as |v| grows toward the edge.
  for (double u : {0.2, 0.7}) {
    double prev = mu({u, 0.0});
    for (int i = 1; i <= 32; ++i) {
      const double v = (kPi / 4) * i / 32;
      const double cur = mu({u, v});
      CHECK(cur <= prev + 1e-15);
      CHECK(mu({u, -v}) == doctest::Approx(cur).epsilon(1e-14));
      prev = cur;
    }
  }

  CHECK_THROWS_AS(mu({0.1, kPi / 4 + 1e-6}), DomainError);
  CHECK_THROWS_AS(mu({0.0, 0.0}), EvalError);
}

/*---------------------------------------------------------------------------
 * Line integrals of the metric
 *---------------------------------------------------------------------------*/

TEST_CASE("level curves of the strip map carry unit metric mass") {
  const AnalyticMap p = strip_map();
  for (double r : {0.1, 0.3, 0.5, 0.6, 0.9}) {
    const Polyline c = image_polygon(p, r, 1 << 16);
    const double m = line_integral(c, mu_field);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-6));
  }
  // Right half of the curve carries exactly half the mass by symmetry.
  for (double r : {0.5, 0.9}) {
    const Polyline h = half_image_polygon(p, r, 1 << 15);
    const double m = line_integral(h, mu_field);
    CHECK(m == doctest::Approx(0.5).epsilon(2e-6));
  }
  // Zero field integrates to zero.
  const Polyline c = image_polygon(p, 0.5, 64);
  CHECK(line_integral(c, [](Complex) { return 0.0; }) == 0.0);
}

TEST_CASE("line integral error paths") {
  // A chord through the pole at w = 0 must be rejected, not averaged over.
  Polyline through;
  through.closed = false;
  through.pts = {{-0.3, 0.0}, {0.3, 0.0}};
  CHECK_THROWS_AS(line_integral(through, mu_field), SingularityOnPath);

  // A chord skimming the pole needs many panels; a starved budget throws.
  Polyline skim;
  skim.closed = false;
  skim.pts = {{-0.7, 0.01}, {0.7, 0.01}};
  QuadratureConfig starved;
  starved.max_subdivisions = 1;
  CHECK_THROWS_AS(line_integral(skim, mu_field, starved), RefinementLimit);
  // With the default budget the same chord integrates fine.
  CHECK(line_integral(skim, mu_field) > 0.0);
}

TEST_CASE("adaptive 1-D integral sanity") {
  const double v =
      adaptive_integral([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(adaptive_integral([](double) { return 1.0; }, 2.0, 2.0, 1e-12) == 0.0);
}

/*---------------------------------------------------------------------------
 * Area integrals between level curves
 *---------------------------------------------------------------------------*/

TEST_CASE("mu^2 mass of the annular region between level curves") {
  const AnalyticMap p = strip_map();
  const Region outer = level_region(p, 0.9, 1e-4);
  const Region inner = level_region(p, 0.1, 1e-4);

  const double a = area_integral(outer, inner, mu_sq);
  // Conformal invariance gives (1/2pi) ln(0.9/0.1) exactly.
  CHECK(a == doctest::Approx(kLn9Over2Pi).epsilon(1e-3));

  // Halving the slice pitch twice must tighten the estimate.
  QuadratureConfig c1 = QuadratureConfig::area_defaults();
  QuadratureConfig c2 = c1;
  c2.area_cell = c1.area_cell / 2;
  QuadratureConfig c3 = c1;
  c3.area_cell = c1.area_cell / 4;
  const double a1 = area_integral(outer, inner, mu_sq, c1);
  const double a2 = area_integral(outer, inner, mu_sq, c2);
  const double a3 = area_integral(outer, inner, mu_sq, c3);
  const double d12 = std::abs(a2 - a1);
  const double d23 = std::abs(a3 - a2);
  CHECK(d23 <= d12);
  CHECK(d23 < 1e-6);

  // The exclusion must cover the pole.
  const Region off_center = rect_region(0.2, 0.4, 0.2, 0.4);
  CHECK_THROWS_AS(area_integral(outer, off_center, mu_sq), ExclusionMissing);
}

/*---------------------------------------------------------------------------
 * Transport plans
 *---------------------------------------------------------------------------*/

TEST_CASE("transport plan on the strip map is flat") {
  // For the strip the level regions are nested slabs of the strip itself:
  // nothing shifts, nothing lifts, and the transported graph reproduces the
  // inner level curve.
  const SideTransport st =
      make_side_transport(strip_map(), 0.9, 0.5, 0.1, Side::Positive);
  const TransportPlan& plan = st.plan;

  REQUIRE(plan.n_prime >= 1);
  CHECK(plan.pattern_ok);
  CHECK(plan.k_prime == plan.n_prime);
  CHECK(plan.total_shift == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(plan.eps_total <= 1e-9);

  int axis_cells = 0;
  for (const CellTransport& ct : plan.cells) {
    CHECK(ct.lift >= -1e-9);
    CHECK(ct.lift <= 1e-9);
    CHECK(std::abs(ct.sigma) <= 1e-9);
    if (ct.kind == GammaKind::HitsAxis) {
      ++axis_cells;
      CHECK(ct.b_r == doctest::Approx(kHalfLn3).epsilon(1e-3));
    }
  }
  CHECK(axis_cells == 1);

  // First cell: the shift normalizes its left edge to u = 0.
  CHECK(plan.cells.front().sigma == doctest::Approx(-plan.cells.front().a)
                                        .epsilon(1e-15));

  REQUIRE(plan.gamma_star.pts.size() > 10);
  const Complex front = plan.gamma_star.pts.front();
  const Complex back = plan.gamma_star.pts.back();
  CHECK(front.real() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(front.imag() == doctest::Approx(kAtanHalf).epsilon(1e-3));
  CHECK(back.real() == doctest::Approx(kHalfLn3).epsilon(1e-3));
  CHECK(back.imag() == doctest::Approx(0.0).epsilon(1e-6));

  // Every transported vertex sits on |tanh w| = r up to section accuracy.
  double worst = 0.0;
  for (const Complex& w : plan.gamma_star.pts)
    worst = std::max(worst, std::abs(std::abs(std::tanh(w)) - 0.5));
  CHECK(worst <= 1e-3);
}

TEST_CASE("transport plans across the catalog stay consistent") {
  for (const std::string& name : catalog_names()) {
    const AnalyticMap f = catalog_map(name);
    for (double rho : {0.8, 0.9}) {
      for (double r : {0.3, 0.6}) {
        for (Side side : {Side::Positive, Side::Negative}) {
          CAPTURE(name);
          CAPTURE(rho);
          CAPTURE(r);
          const SideTransport st = make_side_transport(f, rho, r, 0.1, side);
          CHECK(st.plan.pattern_ok);
          for (const CellTransport& ct : st.plan.cells) {
            CHECK(ct.lift >= -1e-9);
            CHECK(ct.b_r >= ct.a - 1e-15);
            CHECK(ct.b_r <= ct.b_rho + 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("transport domain errors") {
  CHECK_THROWS_AS(make_side_transport(strip_map(), 0.5, 0.5, 0.1,
                                      Side::Positive),
                  DomainError);
  CHECK_THROWS_AS(make_side_transport(strip_map(), 0.5, 0.9, 0.1,
                                      Side::Positive),
                  DomainError);
}

TEST_CASE("transported density matches the strip metric under the graph") {
  const SideTransport st =
      make_side_transport(strip_map(), 0.9, 0.5, 0.1, Side::Positive);

  // Below the transported graph the density is mu evaluated at the graph
  // height; for the strip that height solves |tanh(u + iv)| = r.
  double worst = 0.0;
  int sampled = 0;
  for (int i = 1; i <= 40; ++i) {
    const double u = 0.012 * i;
    if (u >= kHalfLn3 - 1e-3) break;
    double lo = 0.0, hi = kPi / 4 - 1e-9;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std::abs(std::tanh(Complex{u, mid})) < 0.5 ? lo : hi) = mid;
    }
    const double got = mu_plus({u, 0.123}, st.plan, st.dec);
    if (got == 0.0) continue;
    const double want = mu({u, lo});
    worst = std::max(worst, std::abs(got - want) / want);
    ++sampled;
  }
  CHECK(sampled >= 30);
  CHECK(worst <= 1e-2);

  // Outside the region, and beyond the trimmed right ends, it vanishes.
  CHECK(mu_plus({10.0, 0.0}, st.plan, st.dec) == 0.0);
  CHECK(mu_plus({kHalfLn3 + 0.2, 0.1}, st.plan, st.dec) == 0.0);
}

/*---------------------------------------------------------------------------
 * Boundary-mass lower bound per side
 *---------------------------------------------------------------------------*/

TEST_CASE("per-side boundary mass: strip is exactly one half") {
  for (double delta : {0.1, 0.05, 0.025}) {
    const Prop3Result r = prop3_lower_bound(strip_map(), 0.5, 0.9, delta);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(r.eps_report <= 1e-4);
  }
}

TEST_CASE("per-side boundary mass: non-extremal maps clear the floor") {
  for (const char* name : {"koebe", "half_plane"}) {
    CAPTURE(name);
    const AnalyticMap f = catalog_map(name);
    double prev_eps = 1e9;
    double last_value = 0.0;
    for (double delta : {0.1, 0.05, 0.025}) {
      const Prop3Result r = prop3_lower_bound(f, 0.5, 0.9, delta);
      CHECK(r.eps_report <= prev_eps + 1e-4);
      prev_eps = r.eps_report;
      last_value = r.value;
    }
    CHECK(last_value >= 0.45);
  }
}

/*---------------------------------------------------------------------------
 * Containment radius and the area upper bound
 *---------------------------------------------------------------------------*/

TEST_CASE("containment radius") {
  // The strip map contains its own level regions exactly.
  for (double r0 : {0.2, 0.1, 0.05})
    CHECK(containment_radius(strip_map(), r0) ==
          doctest::Approx(r0).epsilon(1e-3));

  // For the Koebe map the inner radius is strictly smaller but approaches
  // r0 as r0 shrinks (the map flattens to the identity near 0).
  double prev_ratio = 0.0;
  for (double r0 : {0.2, 0.1, 0.05}) {
    const double rp = containment_radius(koebe_map(), r0);
    CHECK(rp > 0.0);
    CHECK(rp < r0);
    const double ratio = rp / r0;
    CHECK(ratio > prev_ratio);
    prev_ratio = ratio;
  }
  CHECK(prev_ratio > 0.9);

  // No admissible inner radius when the target region is too small.
  CHECK_THROWS_AS(containment_radius(koebe_map(), 1e-5), NoContainmentRadius);
}

TEST_CASE("area upper bound between containment radii") {
  const Prop4Result rs = prop4_upper_bound(strip_map(), 0.1, 0.9, 0.1);
  CHECK(rs.r0_prime == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(rs.value == doctest::Approx(kLn9Over4Pi).epsilon(1e-3));
  CHECK(rs.bound == doctest::Approx(kLn10Over4Pi).epsilon(1e-3));
  CHECK(rs.bound_r0 == doctest::Approx(kLn10Over4Pi).epsilon(1e-12));
  CHECK(rs.holds);

  const Prop4Result rk = prop4_upper_bound(koebe_map(), 0.1, 0.9, 0.1);
  CHECK(rk.value <= rk.bound);
  CHECK(rk.holds);
  // Smaller inner radius means a weaker (larger) bound than the ideal one.
  CHECK(rk.bound >= rk.bound_r0);

  CHECK_THROWS_AS(prop4_upper_bound(strip_map(), 0.9, 0.5, 0.1), DomainError);
}

/*---------------------------------------------------------------------------
 * Excess of the full boundary mass over one
 *---------------------------------------------------------------------------*/

TEST_CASE("boundary-mass excess vanishes on the strip family") {
  const Eq5Result rs =
      eq5_excess(strip_map(), 0.5, 0.9, 0.1, QuadratureConfig::line_defaults());
  CHECK(std::abs(rs.t_excess) <= 1e-4);

  const AnalyticMap rot =
      scaled_rotated_strip(kPi / 2, std::polar(1.0, kPi / 4), {0.0, 0.0});
  const Eq5Result rr =
      eq5_excess(rot, 0.5, 0.9, 0.1, QuadratureConfig::line_defaults());
  CHECK(std::abs(rr.t_excess) <= 1e-4);
}

TEST_CASE("boundary-mass excess is positive and stable for the Koebe map") {
  const Eq5Result a =
      eq5_excess(koebe_map(), 0.5, 0.9, 0.1, QuadratureConfig::line_defaults());
  const Eq5Result b = eq5_excess(koebe_map(), 0.5, 0.9, 0.05,
                                 QuadratureConfig::line_defaults());
  CHECK(a.t_excess > 0.01);
  CHECK(b.t_excess > 0.01);
  CHECK(std::abs(a.t_excess - b.t_excess) <=
        0.2 * std::max(a.t_excess, b.t_excess));
}

/*---------------------------------------------------------------------------
 * Rigidity via the Schwarz lemma
 *---------------------------------------------------------------------------*/

TEST_CASE("schwarz rigidity recovers the strip map as a rotation") {
  for (double r : {0.5, 0.9}) {
    const SchwarzResult s = schwarz_rigidity_check(strip_map(), r);
    CHECK(s.r_prime == doctest::Approx(r).epsilon(1e-6));
    CHECK(s.sup_ratio == doctest::Approx(1.0).epsilon(1e-8));
  }

  // A vertically translated strip image is recentred by c and still rigid.
  const AnalyticMap shifted =
      scaled_rotated_strip(kPi / 2, {1.0, 0.0}, {0.0, 0.3});
  const SchwarzResult s = schwarz_rigidity_check(shifted, 0.5, {0.0, -0.3});
  CHECK(s.r_prime == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s.sup_ratio == doctest::Approx(1.0).epsilon(1e-8));

  // Without recentring the image leaves the strip.
  CHECK_THROWS_AS(schwarz_rigidity_check(shifted, 0.5), NotATranslate);
  // Non-strip images are rejected outright.
  CHECK_THROWS_AS(schwarz_rigidity_check(koebe_map(), 0.5), NotATranslate);
  // The recentring offset must be purely imaginary.
  CHECK_THROWS_AS(schwarz_rigidity_check(strip_map(), 0.5, {0.1, 0.0}),
                  DomainError);
}

/*---------------------------------------------------------------------------
 * The contradiction chain
 *---------------------------------------------------------------------------*/

TEST_CASE("contradiction chain separates the strip family from the rest") {
  const std::vector<double> r0s{0.2, 0.1, 0.05};

  // Koebe: the gap decreases with r0 and turns negative, which is the
  // contradiction that forces a long vertical segment.
  {
    const auto rows = contradiction_chain(koebe_map(), 0.95, r0s, 0.3, 0.8,
                                          0.25);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].gap > rows[1].gap);
    CHECK(rows[1].gap > rows[2].gap);
    CHECK(rows[2].gap < 0.0);
    for (const ChainRow& row : rows) {
      CHECK(row.eps >= 0.0);
      CHECK(row.r0_prime <= row.r0 + 1e-9);
    }
  }

  // The strip family keeps a positive gap at every r0: no contradiction.
  const AnalyticMap rot =
      scaled_rotated_strip(kPi / 2, std::polar(1.0, kPi / 4), {0.0, 0.0});
  for (const AnalyticMap& f : {strip_map(), rot}) {
    const auto rows = contradiction_chain(f, 0.95, r0s, 0.3, 0.8, 0.25);
    REQUIRE(rows.size() == 3);
    for (const ChainRow& row : rows) CHECK(row.gap > 0.0);
  }

  CHECK_THROWS_AS(contradiction_chain(strip_map(), 0.95, r0s, 0.8, 0.3, 0.25),
                  DomainError);
}

/*---------------------------------------------------------------------------
 * Slope inequality behind symmetrization
 *---------------------------------------------------------------------------*/

TEST_CASE("interlaced layer slope inequality") {
  std::vector<double> grid(17);
  for (int i = 0; i < 17; ++i) grid[i] = i / 16.0;

  std::mt19937 gen(987654321u);
  std::uniform_real_distribution<double> dv(-1.0, 1.0);
  std::uniform_int_distribution<int> dc(1, 4);

  SUBCASE("one pair with mirrored layers is an exact equality") {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> top(17);
      for (double& x : top) x = std::abs(dv(gen));
      std::vector<double> bot(17);
      for (int i = 0; i < 17; ++i) bot[i] = -top[i];
      CHECK(minkowski_check(grid, {top, bot}, 1e-12));
      // Slack is zero to rounding on every interval.
      for (int i = 0; i + 1 < 17; ++i) {
        const double du = grid[i + 1] - grid[i];
        const double s1 = (top[i + 1] - top[i]) / du;
        const double s2 = (bot[i + 1] - bot[i]) / du;
        const double lhs =
            std::sqrt(1 + s1 * s1) + std::sqrt(1 + s2 * s2);
        const double star = 0.5 * (s1 - s2);
        const double rhs = 2 * std::sqrt(1 + star * star);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
      }
    }
  }

  SUBCASE("constant layers with two or more pairs are strict") {
    const std::vector<std::vector<double>> layers{
        std::vector<double>(17, 1.0), std::vector<double>(17, 0.5),
        std::vector<double>(17, -0.5), std::vector<double>(17, -1.0)};
    CHECK(minkowski_check(grid, layers, 1e-12));
    // lhs = 4, rhs = 2 on every interval: comfortably strict.
  }

  SUBCASE("random interlaced families always satisfy the inequality") {
    for (int family = 0; family < 1000; ++family) {
      const int pairs = dc(gen);
      std::vector<std::vector<double>> layers(2 * pairs,
                                              std::vector<double>(17));
      for (int i = 0; i < 17; ++i) {
        std::vector<double> col(2 * pairs);
        for (double& x : col) x = dv(gen);
        std::sort(col.rbegin(), col.rend());
        for (int c = 0; c < 2 * pairs; ++c) layers[c][i] = col[c];
      }
      CHECK(minkowski_check(grid, layers));
    }
  }

  SUBCASE("error paths") {
    CHECK_THROWS_AS(
        minkowski_check(grid, {std::vector<double>(17, 0.0)}),
        OddLayerCount);
    CHECK_THROWS_AS(minkowski_check(grid,
                                    {std::vector<double>(17, 0.0),
                                     std::vector<double>(17, 1.0)}),
                    DomainError);
    std::vector<double> bad_grid{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(minkowski_check(bad_grid,
                                    {std::vector<double>(3, 1.0),
                                     std::vector<double>(3, 0.0)}),
                    DomainError);
  }
}
