#pragma once

#include <functional>
#include <vector>

#include "vertcover/geometry.hpp"

namespace vertcover {

// Quadrature controls.  Lines default to tight tolerances; area integrals
// are softer (see area_defaults()).
struct QuadratureConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  int max_subdivisions = 20000;
  double area_cell = 0.05;  // initial slice pitch for area integration

  static QuadratureConfig line_defaults() { return {}; }
  static QuadratureConfig area_defaults() {
    QuadratureConfig c;
    c.abs_tol = 1e-5;
    c.rel_tol = 1e-6;
    return c;
  }
};

// The extremal strip metric 1/(pi |sinh 2w|) on |Im w| <= pi/4.
// Throws DomainError outside the closed strip and EvalError at the pole w = 0.
double mu(Complex w);

// Same metric evaluated literally as (1/2pi) |d/dw ln(tanh w)|; kept as an
// independent form for cross-checking the closed expression.
double mu_via_inverse(Complex w);

using ScalarField = std::function<double(Complex)>;

// Arc-length integral of a scalar field over an open or closed polyline.
// Adaptive Gauss-Kronrod per segment; throws SingularityOnPath when the
// field blows up (or throws EvalError) at a sample point, RefinementLimit
// when cfg.max_subdivisions is exhausted.
double line_integral(const Polyline& curve, const ScalarField& field,
                     const QuadratureConfig& cfg =
                         QuadratureConfig::line_defaults());

// Integral of a scalar field over region minus exclusion.  The exclusion
// must contain w = 0 in its interior (the intended fields are singular
// there); otherwise ExclusionMissing.  Implemented as adaptive slices in u
// with exact section clipping in v.
double area_integral(const Region& region, const Region& exclusion,
                     const ScalarField& field,
                     const QuadratureConfig& cfg =
                         QuadratureConfig::area_defaults());

// 1-D adaptive Gauss-Kronrod integral; the building block of the integrals
// above, exposed for derived quantities.
double adaptive_integral(const std::function<double(double)>& g, double a,
                         double b, double abs_tol,
                         int max_subdivisions = 2000);

// Slope inequality behind the symmetrization step: for interlaced layers
// v_1 >= v_2 >= ... >= v_{2C} sampled on a common grid,
//   sum_c sqrt(1 + v_c'^2) >= 2 sqrt(1 + v*'^2),  v* = (1/2) sum (-1)^{c+1} v_c,
// on every grid interval.  Throws OddLayerCount for an odd layer count and
// DomainError when the layers are not interlaced.
bool minkowski_check(const std::vector<double>& grid_u,
                     const std::vector<std::vector<double>>& layers,
                     double tol = 1e-12);

}  // namespace vertcover
