#pragma once

#include <cstdint>
#include <vector>

#include "vertcover/geometry.hpp"

namespace vertcover {

// Intersection of a region with a vertical line: disjoint ascending
// v-intervals.  `u_effective` records the abscissa actually used after
// degeneracy perturbation (vertex coincidences are nudged by 2 snap_tol).
struct CrossSection {
  double u = 0.0;
  double u_effective = 0.0;
  std::vector<Interval> intervals;

  double measure() const {
    double acc = 0.0;
    for (const auto& iv : intervals) acc += iv.length();
    return acc;
  }
  bool contains(double v) const {
    for (const auto& iv : intervals)
      if (iv.contains(v)) return true;
    return false;
  }
  // Total overlap length with [w.lo, w.hi].
  double overlap(const Interval& w) const {
    double acc = 0.0;
    for (const auto& iv : intervals) acc += Interval::overlap(iv, w);
    return acc;
  }
};

// Builds a single-shell region from a closed polyline; orientation is
// normalized to positive and snap_tol set to 1e-9 times the diameter.
Region region_from_polyline(const Polyline& poly);

CrossSection vertical_cross_section(const Region& region, double u);

// Batch form: one sweep over the edges for many abscissas; results are
// returned in the order of `us`.
std::vector<CrossSection> vertical_cross_sections(const Region& region,
                                                  const std::vector<double>& us);

bool region_contains(const Region& region, Complex p);

double region_area(const Region& region);
double region_area_monte_carlo(const Region& region, int samples,
                               std::uint64_t seed);

// Bucketed-edge index for fast repeated single-line queries on one region.
class SectionIndex {
 public:
  explicit SectionIndex(const Region& region);
  CrossSection section(double u) const;
  bool contains(Complex p) const;
  const Region& region() const { return *region_; }

 private:
  struct Edge {
    double x0, y0, x1, y1;
  };
  const Region* region_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<double> vertex_xs_;
  double xlo_ = 0.0, xhi_ = 0.0, bucket_w_ = 1.0;
  double snap_ = 0.0, exact_ = 0.0;

  double resolve_u(double u) const;
};

// Steiner symmetrization about the real axis: every vertical section is
// replaced by the centered interval of the same measure.  Piecewise-linear
// section measures are recovered exactly between vertex abscissas, so area
// and section measures are preserved to rounding.  `extra_grid` abscissas
// are added as chain vertices.
Region steiner_symmetrize(const Region& region,
                          const std::vector<double>& extra_grid = {});

struct MaxSegment {
  double length = 0.0;  // sup of single-interval section lengths
  double u = 0.0;       // abscissa attaining it (ties: smallest u)
  Interval v;           // the attaining interval
};

// Longest vertical segment contained in the region.  Candidates: vertex
// abscissas with one-sided extrapolation, two interior samples per slab,
// and a uniform grid.
MaxSegment max_vertical_segment(const Region& region, int grid = 2048);

// Cell grid marking the region cells reachable from the origin cell by
// staircase moves: {right, up, down} on the u >= 0 side and {left, up,
// down} on the u <= 0 side.
struct ReachGrid {
  double x0 = 0.0, y0 = 0.0, step = 1.0;
  int nx = 0, ny = 0;
  int j0 = 0, i0 = 0;  // origin cell
  std::vector<std::uint8_t> inside, reached;

  bool in_range(int j, int i) const {
    return j >= 0 && j < nx && i >= 0 && i < ny;
  }
  std::size_t idx(int j, int i) const {
    return (std::size_t)j * (std::size_t)ny + (std::size_t)i;
  }
  bool cell_inside(int j, int i) const {
    return in_range(j, i) && inside[idx(j, i)] != 0;
  }
  bool cell_reached(int j, int i) const {
    return in_range(j, i) && reached[idx(j, i)] != 0;
  }
  int col_of(double u) const { return (int)std::floor((u - x0) / step); }
  int row_of(double v) const { return (int)std::floor((v - y0) / step); }
  bool reached_at(double u, double v) const {
    return cell_reached(col_of(u), row_of(v));
  }
  // Merged u-intervals of columns holding at least one reached cell.
  std::vector<Interval> reachable_columns() const;
  double max_reached_u() const;
  double min_reached_u() const;
};

ReachGrid monotone_reachable_grid(const Region& region, double step);

}  // namespace vertcover
