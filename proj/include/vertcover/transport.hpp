#pragma once

#include <vector>

#include "vertcover/analytic_map.hpp"
#include "vertcover/geometry.hpp"
#include "vertcover/metric.hpp"
#include "vertcover/region_ops.hpp"
#include "vertcover/slab.hpp"

namespace vertcover {

/*---------------------------------------------------------------------------
 * Symmetrize-and-translate transport of the level curve
 *---------------------------------------------------------------------------*/

// How the symmetrized curve piece of one cell terminates on the right.
enum class GammaKind {
  SpansSlab,  // reaches the right wall: the disk image covers the cell there
  HitsAxis,   // descends to v = 0 inside the cell
  Empty       // the disk image misses the cell
};

struct CellTransport {
  int cell_id = -1;
  double sigma = 0.0;  // horizontal translation of the symmetrized cell
  double a = 0.0;      // left wall abscissa (working coords)
  double b_rho = 0.0;  // right wall abscissa
  double b_r = 0.0;    // right end of {u : B(r) meets the cell}
  GammaKind kind = GammaKind::Empty;
  std::vector<double> us;      // sample abscissas on [a, b_r]
  std::vector<double> v_star;  // half of the B(r)-section measure in the cell
  double lift = 0.0;           // upward translation applied to the piece
  double left_shift = 0.0;     // leftward translation applied during closing
};

struct TransportPlan {
  Side side = Side::Positive;
  double rho = 0.0, r = 0.0;
  std::vector<CellTransport> cells;  // follows Decomposition::ordered
  int k_prime = 0;                   // 1-based index of the first axis-hitting
  int n_prime = 0;                   // 1-based index of the last nonempty
  bool pattern_ok = true;  // spans... then hits-axis... then empty, in order
  Polyline gamma_prime;    // lifted pieces before the closing shifts
  Polyline gamma_star;     // connected curve inside the closed strip
  double total_shift = 0.0;  // sum of leftward closing translations
  double eps_prime = 0.0;    // max per-piece metric-length drift from shifting
  double eps_total = 0.0;    // 2 * eps_prime * (n_prime - k_prime)

  const CellTransport* by_cell(int cell_id) const;
};

// Builds the transport at level r against a decomposition of the rho-level
// region.  br_work is the r-level region in working coordinates.
// Throws LiftNegative if a lift amount drops below -1e-9 (an upstream
// section-inequality violation) and AssemblyGap if the closed curve cannot
// be chained continuously.
TransportPlan build_transport(const Decomposition& dec, const Region& br_work,
                              double rho, double r,
                              int samples_per_cell = 96);

// Transported metric tied to the plan's level r: a point of a reachable cell
// maps to the symmetrized boundary ordinate v*_k(u) shifted by sigma_k;
// zero outside the reachable cells or beyond b_k(r).  The point must lie in
// the rho-level region (unchecked; integration stays inside by construction).
double mu_plus(Complex w, const TransportPlan& plan, const Decomposition& dec);

// Boundary arcs of the region lying in {u >= 0}, split at the imaginary axis.
std::vector<Polyline> positive_boundary_arcs(const Region& region);

/*---------------------------------------------------------------------------
 * One side of the verification, bundled
 *---------------------------------------------------------------------------*/

struct SideTransport {
  Decomposition dec;
  Region br;  // r-level region, working coordinates
  TransportPlan plan;
};

SideTransport make_side_transport(const AnalyticMap& f, double rho, double r,
                                  double delta, Side side,
                                  double trace_tol = 1e-4);

/*---------------------------------------------------------------------------
 * The quantitative checks
 *---------------------------------------------------------------------------*/

struct Prop3Result {
  double value = 0.0;       // integral of mu_plus over gamma(r) cap {u > 0}
  double eps_report = 0.0;  // max(0, 1/2 - value)
};

Prop3Result prop3_lower_bound(const AnalyticMap& f, double r, double rho,
                              double delta,
                              const QuadratureConfig& cfg =
                                  QuadratureConfig::line_defaults());

// Largest radius rp with the rp-level strip region contained in the r0-level
// region of f (their boundaries touch at the supremum).  Throws
// NoContainmentRadius when even a tiny strip region does not fit.
double containment_radius(const AnalyticMap& f, double r0,
                          double trace_tol = 3e-4);

struct Prop4Result {
  double value = 0.0;     // integral of mu_plus^2 over the transported cells
  double bound = 0.0;     // -(1/4pi) ln r0_prime
  double bound_r0 = 0.0;  // -(1/4pi) ln r0, surfaced alongside
  double r0_prime = 0.0;
  bool holds = false;
};

Prop4Result prop4_upper_bound(const AnalyticMap& f, double r0, double rho,
                              double delta,
                              const QuadratureConfig& cfg =
                                  QuadratureConfig::area_defaults());

struct Eq5Result {
  double value = 0.0;     // full-curve integral of the two-sided metric
  double t_excess = 0.0;  // value - 1
};

Eq5Result eq5_excess(const AnalyticMap& f, double r, double rho, double delta,
                     const QuadratureConfig& cfg =
                         QuadratureConfig::line_defaults());

struct SchwarzResult {
  double r_prime = 0.0;
  double sup_ratio = 0.0;  // max |g(z)|/|z| on |z| = r; <= 1 by Schwarz
};

// Requires gamma(r, f) to be a vertical translate (by c, Re c = 0) of some
// strip level curve; throws NotATranslate otherwise.
SchwarzResult schwarz_rigidity_check(const AnalyticMap& f, double r,
                                     Complex c = {0.0, 0.0});

struct ChainRow {
  double r0 = 0.0;
  double r0_prime = 0.0;
  double eps = 0.0;   // measured prop-3 shortfall over [r1, r2]
  double t = 0.0;     // measured eq-5 excess over [r1, r2]
  double lhs = 0.0;   // -(1/2pi) ln r0_prime
  double rhs = 0.0;   // (1-4 eps)/(2pi) ln(rho/r0) + (t+2 eps)/pi ln(r2/r1)
  double gap = 0.0;   // lhs - rhs; turns negative for non-extremal maps
};

std::vector<ChainRow> contradiction_chain(const AnalyticMap& f, double rho,
                                          const std::vector<double>& r0_list,
                                          double r1, double r2, double delta);

}  // namespace vertcover
