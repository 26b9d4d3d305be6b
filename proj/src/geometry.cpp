#include "vertcover/geometry.hpp"

#include <cstdint>
#include <limits>
#include <unordered_map>

namespace vertcover {

double directed_hausdorff(const Polyline& a, const Polyline& b) {
  double worst = 0.0;
  const std::size_t m = b.edge_count();
  if (b.pts.empty()) return std::numeric_limits<double>::infinity();
  for (const auto& p : a.pts) {
    double best = std::numeric_limits<double>::infinity();
    if (m == 0) {
      best = std::abs(p - b.pts.front());
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        const Complex& u = b.pts[i];
        const Complex& v = b.pts[(i + 1) % b.pts.size()];
        best = std::min(best, point_segment_distance(p, u, v));
        if (best == 0.0) break;
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

namespace {

// Proper / improper segment intersection test with tolerance `eps` used
// only to ignore shared endpoints of adjacent edges (handled by caller).
bool segments_intersect(const Complex& p1, const Complex& p2, const Complex& q1,
                        const Complex& q2) {
  auto cross = [](const Complex& o, const Complex& a, const Complex& b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) -
           (a.imag() - o.imag()) * (b.real() - o.real());
  };
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  return false;
}

struct CellKey {
  std::int64_t x, y;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y; }
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<std::int64_t>()(k.x * 73856093ll ^ k.y * 19349663ll);
  }
};

}  // namespace

bool has_self_intersection(const Polyline& poly, double tol) {
  const std::size_t n = poly.edge_count();
  if (n < 4) return false;
  // Hash edges into cells sized by the longest edge so each edge touches
  // O(1) cells; compare only edges sharing a cell.
  double max_len = tol;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex& a = poly.pts[i];
    const Complex& b = poly.pts[(i + 1) % poly.pts.size()];
    max_len = std::max(max_len, std::abs(b - a));
  }
  const double cell = std::max(max_len, 1e-300);
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> grid;
  grid.reserve(n * 2);

  auto edge_pts = [&](std::size_t i, Complex& a, Complex& b) {
    a = poly.pts[i];
    b = poly.pts[(i + 1) % poly.pts.size()];
  };

  for (std::size_t i = 0; i < n; ++i) {
    Complex a, b;
    edge_pts(i, a, b);
    const std::int64_t x0 =
        (std::int64_t)std::floor(std::min(a.real(), b.real()) / cell);
    const std::int64_t x1 =
        (std::int64_t)std::floor(std::max(a.real(), b.real()) / cell);
    const std::int64_t y0 =
        (std::int64_t)std::floor(std::min(a.imag(), b.imag()) / cell);
    const std::int64_t y1 =
        (std::int64_t)std::floor(std::max(a.imag(), b.imag()) / cell);
    for (std::int64_t x = x0; x <= x1; ++x)
      for (std::int64_t y = y0; y <= y1; ++y) {
        auto& bucket = grid[{x, y}];
        for (std::uint32_t j : bucket) {
          // Skip adjacent edges (they share an endpoint by construction).
          const std::size_t lo = std::min<std::size_t>(i, j);
          const std::size_t hi = std::max<std::size_t>(i, j);
          if (hi - lo <= 1) continue;
          if (poly.closed && lo == 0 && hi == n - 1) continue;
          Complex c, d;
          edge_pts(j, c, d);
          if (segments_intersect(a, b, c, d)) return true;
        }
        bucket.push_back((std::uint32_t)i);
      }
  }
  return false;
}

}  // namespace vertcover
