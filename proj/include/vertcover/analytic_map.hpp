#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vertcover/geometry.hpp"

namespace vertcover {

enum class MapKind {
  StripMap,            // p(z) = (1/2) ln((1+z)/(1-z)), image |Im w| < pi/4
  ScaledRotatedStrip,  // a0 + (l/pi) ln((1+eps z)/(1-eps z)), |eps| = 1
  Koebe,               // z/(1-z)^2
  HalfPlane,           // z/(1-z)
  TwoSlit,             // z/(1-z^2)
  PolyConvex,          // z - z^2/2
  PowerSeries,         // finite truncated series on a shrunk disk
};

// A map of the unit disk with closed-form first and second derivatives.
// Catalog members are schlicht (certified); user series are not certified
// unless the caller asserts it.
struct AnalyticMap {
  MapKind kind = MapKind::StripMap;
  std::string name = "strip";

  // ScaledRotatedStrip parameters.
  double ell = kPi / 2;
  Complex eps{1.0, 0.0};
  Complex a0{0.0, 0.0};

  // PowerSeries data: coeffs[k] multiplies z^k.
  std::vector<Complex> coeffs;
  double margin = 1e-3;

  bool schlicht_certified = true;

  Complex eval(Complex z) const;
  Complex deriv(Complex z) const;
  Complex deriv2(Complex z) const;

  // Largest admissible |z| (1 for catalog maps, 1 - margin for series).
  double max_radius() const {
    return kind == MapKind::PowerSeries ? 1.0 - margin : 1.0;
  }
};

/*---------------------------------------------------------------------------
 * Catalog constructors
 *---------------------------------------------------------------------------*/

AnalyticMap strip_map();
AnalyticMap scaled_rotated_strip(double ell, Complex eps, Complex a0);
AnalyticMap koebe_map();
AnalyticMap half_plane_map();
AnalyticMap two_slit_map();
AnalyticMap poly_convex_map();
AnalyticMap power_series_map(std::vector<Complex> coeffs,
                             double margin = 1e-3,
                             bool certified = false);

// Look up a catalog map by name ("strip", "rotated_strip", "koebe",
// "half_plane", "two_slit", "poly_convex"); throws ConfigError otherwise.
AnalyticMap catalog_map(const std::string& name);
const std::vector<std::string>& catalog_names();

// Parse a series file of lines "k re im" (blank lines and '#' comments
// skipped).  Unless `override_normalization`, entries 0 and 1 are forced
// to 0 and 1 for class-S use.
AnalyticMap parse_power_series(std::istream& in, double margin = 1e-3,
                               bool certified = false,
                               bool override_normalization = false);
AnalyticMap load_power_series(const std::string& path, double margin = 1e-3,
                              bool certified = false,
                              bool override_normalization = false);

/*---------------------------------------------------------------------------
 * Operations
 *---------------------------------------------------------------------------*/

// Polyline approximation of the level curve f(|z| = r), traced from phi = 0
// and adaptively bisected until every chord's midpoint image deviates from
// the chord by at most tol.  Throws RefinementLimit past `max_vertices` and
// SelfIntersection when a certified map produces a non-simple curve.
Polyline trace_level_curve(const AnalyticMap& f, double r, double tol,
                           std::size_t max_vertices = (std::size_t)1 << 20,
                           bool check_simple = true);

// First Taylor coefficient a1 = f'(0) recovered by the Cauchy integral
// (1/(2 pi R)) * integral of f(R e^{i t}) e^{-i t} dt, trapezoid rule.
Complex coefficient_a1(const AnalyticMap& f, int nodes = 4096,
                       double radius = 0.5);

// Inverse of the strip map: p^{-1}(w) = tanh(w).  Requires
// |Im w| <= pi/4 + 1e-12; throws DomainError outside.
Complex strip_inverse(Complex w);

// Largest r such that f(|z| < r) is convex, located by bisection on the
// sign of min_phi Re(1 + z f''/f') over |z| = r; returns max_radius() when
// the image stays convex to the boundary.
double convexity_radius(const AnalyticMap& f, double tol = 1e-6);

// max over phi of Re f(r e^{i phi}) (negate = true gives max of -Re f).
double max_real_on_circle(const AnalyticMap& f, double r, bool negate = false);

// Second derivative by central differences on f', step 1e-5 * (1 - r);
// cross-check helper for maps with closed-form deriv2.
Complex deriv2_fd(const AnalyticMap& f, Complex z);

}  // namespace vertcover
