#include "vertcover/analytic_map.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "vertcover/errors.hpp"

namespace vertcover {

namespace {

void check_domain(const AnalyticMap& f, Complex z) {
  const double r = std::abs(z);
  if (f.kind == MapKind::PowerSeries) {
    if (r > 1.0 - f.margin + 1e-15)
      throw DomainError("series map evaluated at |z| = " + std::to_string(r) +
                        " beyond 1 - margin = " +
                        std::to_string(1.0 - f.margin));
  } else if (r >= 1.0) {
    throw DomainError("map evaluated at |z| = " + std::to_string(r) +
                      " outside the unit disk");
  }
}

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

}  // namespace

Complex AnalyticMap::eval(Complex z) const {
  check_domain(*this, z);
  switch (kind) {
    case MapKind::StripMap:
      return 0.5 * std::log((1.0 + z) / (1.0 - z));
    case MapKind::ScaledRotatedStrip: {
      const Complex t = eps * z;
      return a0 + (ell / kPi) * std::log((1.0 + t) / (1.0 - t));
    }
    case MapKind::Koebe:
      return z / ((1.0 - z) * (1.0 - z));
    case MapKind::HalfPlane:
      return z / (1.0 - z);
    case MapKind::TwoSlit:
      return z / (1.0 - z * z);
    case MapKind::PolyConvex:
      return z - 0.5 * z * z;
    case MapKind::PowerSeries:
      return horner(coeffs, z);
  }
  throw EvalError("unhandled map kind");
}

Complex AnalyticMap::deriv(Complex z) const {
  check_domain(*this, z);
  switch (kind) {
    case MapKind::StripMap:
      return 1.0 / (1.0 - z * z);
    case MapKind::ScaledRotatedStrip: {
      const Complex e2z2 = eps * eps * z * z;
      return (ell / kPi) * 2.0 * eps / (1.0 - e2z2);
    }
    case MapKind::Koebe: {
      const Complex d = 1.0 - z;
      return (1.0 + z) / (d * d * d);
    }
    case MapKind::HalfPlane: {
      const Complex d = 1.0 - z;
      return 1.0 / (d * d);
    }
    case MapKind::TwoSlit: {
      const Complex d = 1.0 - z * z;
      return (1.0 + z * z) / (d * d);
    }
    case MapKind::PolyConvex:
      return 1.0 - z;
    case MapKind::PowerSeries: {
      Complex acc{0.0, 0.0};
      for (std::size_t i = coeffs.size(); i-- > 1;)
        acc = acc * z + (double)i * coeffs[i];
      return acc;
    }
  }
  throw EvalError("unhandled map kind");
}

Complex AnalyticMap::deriv2(Complex z) const {
  check_domain(*this, z);
  switch (kind) {
    case MapKind::StripMap: {
      const Complex d = 1.0 - z * z;
      return 2.0 * z / (d * d);
    }
    case MapKind::ScaledRotatedStrip: {
      const Complex d = 1.0 - eps * eps * z * z;
      return (ell / kPi) * 4.0 * eps * eps * eps * z / (d * d);
    }
    case MapKind::Koebe: {
      const Complex d = 1.0 - z;
      const Complex d2 = d * d;
      return (4.0 + 2.0 * z) / (d2 * d2);
    }
    case MapKind::HalfPlane: {
      const Complex d = 1.0 - z;
      return 2.0 / (d * d * d);
    }
    case MapKind::TwoSlit: {
      const Complex d = 1.0 - z * z;
      return (6.0 * z + 2.0 * z * z * z) / (d * d * d);
    }
    case MapKind::PolyConvex:
      return Complex{-1.0, 0.0};
    case MapKind::PowerSeries: {
      Complex acc{0.0, 0.0};
      for (std::size_t i = coeffs.size(); i-- > 2;)
        acc = acc * z + (double)(i * (i - 1)) * coeffs[i];
      return acc;
    }
  }
  throw EvalError("unhandled map kind");
}

Complex deriv2_fd(const AnalyticMap& f, Complex z) {
  const double h = 1e-5 * (1.0 - std::abs(z));
  if (h <= 0.0) throw DomainError("finite-difference step vanished at |z| >= 1");
  return (f.deriv(z + h) - f.deriv(z - h)) / (2.0 * h);
}

/*---------------------------------------------------------------------------
 * Catalog constructors
 *---------------------------------------------------------------------------*/

AnalyticMap strip_map() {
  AnalyticMap m;
  m.kind = MapKind::StripMap;
  m.name = "strip";
  return m;
}

AnalyticMap scaled_rotated_strip(double ell, Complex eps, Complex a0) {
  if (!(ell > 0.0)) throw ConfigError("scaled strip requires l > 0");
  const double mag = std::abs(eps);
  if (mag < 1e-12) throw ConfigError("scaled strip requires unit-modulus eps");
  AnalyticMap m;
  m.kind = MapKind::ScaledRotatedStrip;
  m.name = "scaled_strip";
  m.ell = ell;
  m.eps = eps / mag;
  m.a0 = a0;
  return m;
}

AnalyticMap koebe_map() {
  AnalyticMap m;
  m.kind = MapKind::Koebe;
  m.name = "koebe";
  return m;
}

AnalyticMap half_plane_map() {
  AnalyticMap m;
  m.kind = MapKind::HalfPlane;
  m.name = "half_plane";
  return m;
}

AnalyticMap two_slit_map() {
  AnalyticMap m;
  m.kind = MapKind::TwoSlit;
  m.name = "two_slit";
  return m;
}

AnalyticMap poly_convex_map() {
  AnalyticMap m;
  m.kind = MapKind::PolyConvex;
  m.name = "poly_convex";
  return m;
}

AnalyticMap power_series_map(std::vector<Complex> coeffs, double margin,
                             bool certified) {
  if (!(margin > 0.0 && margin < 1.0))
    throw ConfigError("series margin must lie in (0, 1)");
  AnalyticMap m;
  m.kind = MapKind::PowerSeries;
  m.name = "series";
  m.coeffs = std::move(coeffs);
  if (m.coeffs.size() < 2) m.coeffs.resize(2, Complex{0.0, 0.0});
  m.margin = margin;
  m.schlicht_certified = certified;
  return m;
}

AnalyticMap catalog_map(const std::string& name) {
  if (name == "strip") return strip_map();
  if (name == "rotated_strip")
    return [] {
      AnalyticMap m = scaled_rotated_strip(
          kPi / 2, std::polar(1.0, kPi / 4), Complex{0.0, 0.0});
      m.name = "rotated_strip";
      return m;
    }();
  if (name == "koebe") return koebe_map();
  if (name == "half_plane") return half_plane_map();
  if (name == "two_slit") return two_slit_map();
  if (name == "poly_convex") return poly_convex_map();
  throw ConfigError("unknown catalog map '" + name + "'");
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "strip", "rotated_strip", "koebe", "half_plane", "two_slit",
      "poly_convex"};
  return names;
}

AnalyticMap parse_power_series(std::istream& in, double margin, bool certified,
                               bool override_normalization) {
  std::vector<Complex> coeffs(2, Complex{0.0, 0.0});
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long k;
    double re, im;
    if (!(ls >> k)) continue;  // blank or comment-only line
    if (!(ls >> re >> im))
      throw ConfigError("series line " + std::to_string(lineno) +
                        ": expected 'k re im'");
    if (k < 0)
      throw ConfigError("series line " + std::to_string(lineno) +
                        ": negative index");
    if (k > 100000)
      throw ConfigError("series line " + std::to_string(lineno) +
                        ": index too large");
    if ((std::size_t)k >= coeffs.size())
      coeffs.resize((std::size_t)k + 1, Complex{0.0, 0.0});
    coeffs[(std::size_t)k] = Complex{re, im};
  }
  if (!override_normalization) {
    coeffs[0] = Complex{0.0, 0.0};
    coeffs[1] = Complex{1.0, 0.0};
  }
  return power_series_map(std::move(coeffs), margin, certified);
}

AnalyticMap load_power_series(const std::string& path, double margin,
                              bool certified, bool override_normalization) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file '" + path + "'");
  AnalyticMap m =
      parse_power_series(in, margin, certified, override_normalization);
  m.name = path;
  return m;
}

/*---------------------------------------------------------------------------
 * Level-curve tracing
 *---------------------------------------------------------------------------*/

Polyline trace_level_curve(const AnalyticMap& f, double r, double tol,
                           std::size_t max_vertices, bool check_simple) {
  if (!(r > 0.0) || r > f.max_radius())
    throw DomainError("trace radius " + std::to_string(r) +
                      " outside (0, " + std::to_string(f.max_radius()) + "]");
  if (r == f.max_radius() && f.kind != MapKind::PowerSeries)
    throw DomainError("trace radius must be < 1 for catalog maps");
  if (!(tol > 0.0)) throw DomainError("trace tolerance must be positive");

  Polyline out;
  out.closed = true;
  out.pts.reserve(1024);

  const auto at = [&](double phi) { return f.eval(std::polar(r, phi)); };

  // Emits the left endpoint of each converged arc; the wrap-around edge
  // closes the curve.
  const std::function<void(double, const Complex&, double, const Complex&,
                           int)>
      subdivide = [&](double pa, const Complex& wa, double pb,
                      const Complex& wb, int depth) {
        const double pm = 0.5 * (pa + pb);
        const Complex wm = at(pm);
        const double dev = point_segment_distance(wm, wa, wb);
        if (dev <= tol || depth >= 48) {
          if (out.pts.size() >= max_vertices)
            throw RefinementLimit(
                "level-curve refinement exceeded " +
                std::to_string(max_vertices) + " vertices at tol = " +
                std::to_string(tol));
          out.pts.push_back(wa);
          return;
        }
        subdivide(pa, wa, pm, wm, depth + 1);
        subdivide(pm, wm, pb, wb, depth + 1);
      };

  constexpr int kInitialArcs = 8;
  std::vector<Complex> seed(kInitialArcs + 1);
  for (int i = 0; i <= kInitialArcs; ++i)
    seed[i] = at(2.0 * kPi * i / kInitialArcs);
  for (int i = 0; i < kInitialArcs; ++i)
    subdivide(2.0 * kPi * i / kInitialArcs, seed[i],
              2.0 * kPi * (i + 1) / kInitialArcs, seed[i + 1], 0);

  if (check_simple && f.schlicht_certified &&
      has_self_intersection(out, tol))
    throw SelfIntersection("level curve at r = " + std::to_string(r) +
                           " self-intersects; tol too coarse or map invalid");
  return out;
}

/*---------------------------------------------------------------------------
 * Coefficient recovery, inverse, convexity
 *---------------------------------------------------------------------------*/

Complex coefficient_a1(const AnalyticMap& f, int nodes, double radius) {
  if (nodes < 8) throw ConfigError("coefficient recovery needs >= 8 nodes");
  double R = radius;
  if (f.kind == MapKind::PowerSeries)
    R = std::min(R, 1.0 - f.margin - 1e-6);
  if (!(R > 0.0)) throw DomainError("coefficient radius must be positive");
  Complex acc{0.0, 0.0};
  for (int k = 0; k < nodes; ++k) {
    const double t = 2.0 * kPi * k / nodes;
    acc += f.eval(std::polar(R, t)) * std::polar(1.0, -t);
  }
  return acc / (double)nodes / R;
}

Complex strip_inverse(Complex w) {
  if (std::abs(w.imag()) > kPi / 4 + 1e-12)
    throw DomainError("strip inverse evaluated at |Im w| = " +
                      std::to_string(std::abs(w.imag())) +
                      " beyond pi/4");
  return std::tanh(w);
}

namespace {

// Golden-section minimization on [a, b] for a smooth scalar function.
template <typename F>
double golden_min(F&& fn, double a, double b, int iters = 80) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = fn(x2);
    }
  }
  return std::min(f1, f2);
}

// min over phi of Re(1 + z f''/f') on |z| = r, sampled with parabolic
// refinement of the discrete minimum.
double min_convexity_indicator(const AnalyticMap& f, double r, int samples) {
  std::vector<double> g((std::size_t)samples);
  for (int i = 0; i < samples; ++i) {
    const Complex z = std::polar(r, 2.0 * kPi * i / samples);
    const Complex fp = f.deriv(z);
    if (std::abs(fp) < 1e-300)
      return -std::numeric_limits<double>::infinity();
    g[(std::size_t)i] = (1.0 + z * f.deriv2(z) / fp).real();
  }
  int imin = 0;
  for (int i = 1; i < samples; ++i)
    if (g[(std::size_t)i] < g[(std::size_t)imin]) imin = i;
  const double ym = g[(std::size_t)imin];
  const double yl = g[(std::size_t)((imin + samples - 1) % samples)];
  const double yr = g[(std::size_t)((imin + 1) % samples)];
  const double denom = yl - 2.0 * ym + yr;
  if (denom <= 0.0) return ym;
  const double dy = 0.125 * (yl - yr) * (yl - yr) / denom;
  return ym - dy;
}

}  // namespace

double convexity_radius(const AnalyticMap& f, double tol) {
  constexpr int kSamples = 1440;
  const double rmax = f.max_radius() - 1e-9;
  double hi = std::min(0.999, rmax);
  if (min_convexity_indicator(f, hi, kSamples) >= 0.0) return f.max_radius();
  double lo = 1e-3;
  if (min_convexity_indicator(f, lo, kSamples) < 0.0)
    throw EvalError("image not convex even near the origin; map '" + f.name +
                    "' is not schlicht-like");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (min_convexity_indicator(f, mid, kSamples) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double max_real_on_circle(const AnalyticMap& f, double r, bool negate) {
  constexpr int kSamples = 1024;
  const double sign = negate ? -1.0 : 1.0;
  const auto neg_val = [&](double phi) {
    return -sign * f.eval(std::polar(r, phi)).real();
  };
  std::vector<double> g((std::size_t)kSamples);
  for (int i = 0; i < kSamples; ++i)
    g[(std::size_t)i] = sign * f.eval(std::polar(r, 2.0 * kPi * i / kSamples))
                                  .real();
  int imax = 0;
  for (int i = 1; i < kSamples; ++i)
    if (g[(std::size_t)i] > g[(std::size_t)imax]) imax = i;
  const double h = 2.0 * kPi / kSamples;
  const double phi0 = h * imax;
  return -golden_min(neg_val, phi0 - h, phi0 + h);
}

}  // namespace vertcover
