#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace vertcover {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846264338327950288;

// Closed interval [lo, hi] on the real line; empty when hi < lo.
struct Interval {
  double lo = 0.0;
  double hi = -1.0;

  bool empty() const { return hi < lo; }
  double length() const { return empty() ? 0.0 : hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }

  static Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  }
  static double overlap(const Interval& a, const Interval& b) {
    return intersect(a, b).length();
  }
};

// Vertex chain; when `closed`, the last vertex connects back to the first
// (the first vertex is not repeated at the end).
struct Polyline {
  std::vector<Complex> pts;
  bool closed = false;

  std::size_t size() const { return pts.size(); }
  std::size_t edge_count() const {
    if (pts.size() < 2) return 0;
    return closed ? pts.size() : pts.size() - 1;
  }
};

struct BBox {
  double xlo = 0, xhi = -1, ylo = 0, yhi = -1;
  bool empty() const { return xhi < xlo || yhi < ylo; }
  double width() const { return empty() ? 0.0 : xhi - xlo; }
  double height() const { return empty() ? 0.0 : yhi - ylo; }
  double diameter() const {
    return empty() ? 0.0 : std::hypot(width(), height());
  }
  void expand(const Complex& p) {
    if (empty()) {
      xlo = xhi = p.real();
      ylo = yhi = p.imag();
    } else {
      xlo = std::min(xlo, p.real());
      xhi = std::max(xhi, p.real());
      ylo = std::min(ylo, p.imag());
      yhi = std::max(yhi, p.imag());
    }
  }
};

// Plane region bounded by simple polygons: outer shells oriented CCW,
// holes oriented CW.  snap_tol is the absolute coincidence tolerance,
// fixed at construction as 1e-9 times the bounding-box diameter.
struct Region {
  std::vector<std::vector<Complex>> shells;
  std::vector<std::vector<Complex>> holes;
  double snap_tol = 0.0;

  bool empty() const { return shells.empty(); }
};

inline BBox bounding_box(const std::vector<Complex>& ring) {
  BBox b;
  for (const auto& p : ring) b.expand(p);
  return b;
}

inline BBox bounding_box(const Region& r) {
  BBox b;
  for (const auto& s : r.shells)
    for (const auto& p : s) b.expand(p);
  for (const auto& h : r.holes)
    for (const auto& p : h) b.expand(p);
  return b;
}

inline BBox bounding_box(const Polyline& p) { return bounding_box(p.pts); }

// Signed shoelace area; positive for CCW rings.
inline double signed_ring_area(const std::vector<Complex>& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex& a = ring[i];
    const Complex& b = ring[(i + 1) % n];
    acc += a.real() * b.imag() - b.real() * a.imag();
  }
  return 0.5 * acc;
}

inline double polyline_length(const Polyline& p) {
  double acc = 0.0;
  const std::size_t m = p.edge_count();
  for (std::size_t i = 0; i < m; ++i) {
    const Complex& a = p.pts[i];
    const Complex& b = p.pts[(i + 1) % p.pts.size()];
    acc += std::abs(b - a);
  }
  return acc;
}

// Distance from a point to a segment.
inline double point_segment_distance(const Complex& p, const Complex& a,
                                     const Complex& b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 <= 0.0) return std::abs(p - a);
  double t = ((p.real() - a.real()) * d.real() +
              (p.imag() - a.imag()) * d.imag()) /
             len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// One-sided Hausdorff distance from the vertices of `a` to the edges of `b`.
double directed_hausdorff(const Polyline& a, const Polyline& b);

// True if any two non-adjacent edges of the closed polyline intersect.
// Uses a uniform spatial hash; O(n) for well-behaved curves.
bool has_self_intersection(const Polyline& poly, double tol);

}  // namespace vertcover
