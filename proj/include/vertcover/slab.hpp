#pragma once

#include <vector>

#include "vertcover/analytic_map.hpp"
#include "vertcover/geometry.hpp"
#include "vertcover/region_ops.hpp"

namespace vertcover {

/*---------------------------------------------------------------------------
 * Line system
 *---------------------------------------------------------------------------*/

// Vertical lines u = const: every vertical-tangent abscissa of the level
// curve plus a uniform grid of pitch <= delta over the curve's u-extent.
struct LineSystem {
  std::vector<double> u_values;     // sorted, deduplicated
  double delta = 0.0;               // realized max adjacent gap
  bool includes_tangents = true;
  std::vector<double> tangent_us;   // detected tangent abscissas (dedup)
};

LineSystem build_line_system(const AnalyticMap& f, double rho, double delta);

/*---------------------------------------------------------------------------
 * Decomposition into slab cells
 *---------------------------------------------------------------------------*/

enum class Side { Positive, Negative };

// Boundary continuum of a cell on one of its bounding lines.
struct Continuum {
  double u = 0.0;
  Interval v;  // empty when the cell does not touch that line
};

// One sub-slab piece of a face; the bounding chains are linear in u.
struct CellPart {
  double u0 = 0.0, u1 = 0.0;
  Interval left, right;  // v-interval at u0 and at u1

  Interval at(double u) const {
    if (u1 <= u0) return left;
    const double t = std::clamp((u - u0) / (u1 - u0), 0.0, 1.0);
    return {left.lo + t * (right.lo - left.lo),
            left.hi + t * (right.hi - left.hi)};
  }
  double area() const {
    return 0.5 * (u1 - u0) * (left.length() + right.length());
  }
};

// Connected face of one slab.  All coordinates are "working" coordinates:
// the negative side is analyzed mirrored (u -> -u) so movement away from
// zero is always rightward.
struct SlabCell {
  int id = -1;
  int slab = -1;
  double a = 0.0, b = 0.0;        // bounding line abscissas
  std::vector<CellPart> parts;    // ascending in u
  Continuum alpha, beta;          // wall intervals at u = a and u = b
  double r_of_D = -1.0;
  bool reachable = false;
  int order = -1;                 // 1-based rank among ordered cells
  int pred = -1;                  // BFS predecessor (cell id)
  Interval passage;               // shared wall overlap with pred

  // Hull of the part intervals covering abscissa u (empty if none).
  Interval window_at(double u) const;
  // The individual part intervals covering abscissa u.
  std::vector<Interval> parts_at(double u) const;
  double area() const;
  Polyline polygon() const;       // piecewise-linear outline of the parts
};

struct Decomposition {
  Side side = Side::Positive;
  Region region_work;             // mirrored for the negative side
  double rho = 0.0;
  std::vector<double> line_u;     // cut abscissas; front() == 0
  std::vector<SlabCell> cells;
  std::vector<std::vector<int>> slab_faces;  // cell ids per slab
  std::vector<int> ordered;       // reachable cell ids, D1 first
  int origin_cell = -1;
  double snap = 0.0;

  double to_true_u(double u) const {
    return side == Side::Negative ? -u : u;
  }
  int slab_of(double u) const;    // -1 outside [0, last line]
  const SlabCell* cell_at(double u, double v) const;
};

Region reflect_region(const Region& r);

// Traces gamma(r, f), mirrors it for the negative side, and closes it into
// a region.
Region level_region(const AnalyticMap& f, double r, double tol,
                    Side side = Side::Positive);

// Splits region ∩ {u > 0} (working coordinates) by the line system into
// faces, glues sub-slab pieces, and marks faces reachable from w = 0 by
// rightward wall crossings.
Decomposition decompose(const Region& R_rho, const LineSystem& lines,
                        Side side);

// Geometric grid of 64 radii in [0.01, rho].
std::vector<double> default_r_grid(double rho);

// Smallest r such that every vertical line touching the cell's u-interval
// meets the closed level region B(r): located on the grid, refined by
// bisection to 1e-4 in r; exactly rho when no grid radius suffices.
double compute_r_of_D(const SlabCell& cell, const AnalyticMap& f, Side side,
                      double rho, const std::vector<double>& r_grid);

// Fills r_of_D for reachable cells and orders them: D1 = origin cell, then
// ascending r_of_D with ties by a, then alpha.v.lo.  Throws NoOriginCell.
void assign_r_and_order(Decomposition& dec, const AnalyticMap& f, double rho);

// Staircase access polyline from w = 0 to the given cell (working coords).
Polyline monotone_access_curve(const Decomposition& dec, int cell_id);

/*---------------------------------------------------------------------------
 * Proposition checks
 *---------------------------------------------------------------------------*/

// For every cell, the set of abscissas whose vertical line meets
// cell ∩ B(r) must be anchored at the alpha side: no gap below a meeting
// line.  Violations are reported as data, never thrown.
struct Prop1Report {
  int cells_checked = 0;
  int violations = 0;
  int boundary_cells = 0;  // alpha side meets B(r), beta side does not
  struct Item {
    int cell;
    double u_missing, u_meeting;
  };
  std::vector<Item> items;
};

Prop1Report check_prop1(const Decomposition& dec, const Region& Br_work);

// Chained section inequality over the ordered cells:
//   sum_{m >= k} mes B(r) ∩ beta_m  <=  sum_{m > k} mes B(r) ∩ alpha_m.
struct Prop2Result {
  int k = 0;
  double lhs = 0.0, rhs = 0.0;
  bool holds = true;
};

Prop2Result check_prop2(const Decomposition& dec, const Region& Br_work,
                        int k);
std::vector<Prop2Result> check_prop2_all(const Decomposition& dec,
                                         const Region& Br_work);

}  // namespace vertcover
