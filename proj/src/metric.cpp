#include "vertcover/metric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "vertcover/errors.hpp"
#include "vertcover/region_ops.hpp"

namespace vertcover {

/*---------------------------------------------------------------------------
 * The strip metric
 *---------------------------------------------------------------------------*/

static void check_strip(Complex w) {
  if (std::abs(w.imag()) > kPi / 4.0 + 1e-12)
    throw DomainError("mu: point outside the closed strip |v| <= pi/4");
}

double mu(Complex w) {
  check_strip(w);
  const double s = std::abs(std::sinh(2.0 * w));
  if (s < 1e-15) throw EvalError("mu: singular at w = 0");
  return 1.0 / (kPi * s);
}

double mu_via_inverse(Complex w) {
  check_strip(w);
  const Complex t = std::tanh(w);
  const Complex ch = std::cosh(w);
  const Complex d = 1.0 / (t * ch * ch);  // (d/dw) ln tanh w
  if (!std::isfinite(d.real()) || !std::isfinite(d.imag()) ||
      std::abs(t) < 1e-15)
    throw EvalError("mu: singular at w = 0");
  return std::abs(d) / (2.0 * kPi);
}

/*---------------------------------------------------------------------------
 * Gauss-Kronrod 7/15 adaptive quadrature
 *---------------------------------------------------------------------------*/

namespace {

// Standard 15-point Kronrod extension of 7-point Gauss on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526, 0.949107912342758524526189684048,
    0.864864423359769072789712788641, 0.741531185599394439863864773281,
    0.586087235467691130294144838259, 0.405845151377397166906606412077,
    0.207784955007898467600689403773, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058, 0.063092092629978553290700663189,
    0.104790010322250183839876322541, 0.140653259715525918745189590510,
    0.169004726639267902826583426598, 0.190350578064785409913256402421,
    0.204432940075298892414161999234, 0.209482141084727828012999174891};
constexpr double kWg[4] = {
    0.129484966168869693270611432679, 0.279705391489276667901467771423,
    0.381830050505118944950369775488, 0.417959183673469387755102040816};

struct GK {
  double integral;  // Kronrod value
  double error;     // |Kronrod - Gauss|
};

template <typename F>
GK gk15(const F& g, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double resk = 0.0, resg = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double x = h * kXgk[j];
    double v;
    if (j == 7) {
      v = g(c);
      resk += kWgk[7] * v;
      resg += kWg[3] * v;
    } else {
      const double v1 = g(c - x);
      const double v2 = g(c + x);
      v = v1 + v2;
      resk += kWgk[j] * v;
      if (j % 2 == 1) resg += kWg[j / 2] * v;
    }
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

// Adaptive refinement of one interval; LIFO order keeps the accumulation
// deterministic.
template <typename F>
double adapt(const F& g, double a, double b, double tol, int& budget) {
  struct Item {
    double a, b, tol;
  };
  std::vector<Item> stack{{a, b, tol}};
  double acc = 0.0;
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const GK r = gk15(g, it.a, it.b);
    if (r.error <= it.tol || it.b - it.a < 1e-14 * (std::abs(it.a) + 1.0)) {
      acc += r.integral;
      continue;
    }
    if (--budget <= 0)
      throw RefinementLimit("quadrature exceeded max_subdivisions");
    const double m = 0.5 * (it.a + it.b);
    stack.push_back({m, it.b, 0.5 * it.tol});
    stack.push_back({it.a, m, 0.5 * it.tol});
  }
  return acc;
}

}  // namespace

double adaptive_integral(const std::function<double(double)>& g, double a,
                         double b, double abs_tol, int max_subdivisions) {
  if (!(b > a)) return 0.0;
  int budget = max_subdivisions;
  return adapt(g, a, b, std::max(abs_tol, 1e-16), budget);
}

double line_integral(const Polyline& curve, const ScalarField& field,
                     const QuadratureConfig& cfg) {
  if (curve.pts.size() < 2) return 0.0;
  const std::size_t nseg = curve.edge_count();
  double total_len = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    const Complex a = curve.pts[i];
    const Complex b = curve.pts[(i + 1) % curve.pts.size()];
    total_len += std::abs(b - a);
  }
  if (total_len == 0.0) return 0.0;

  int budget = cfg.max_subdivisions;
  double acc = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    const Complex a = curve.pts[i];
    const Complex b = curve.pts[(i + 1) % curve.pts.size()];
    const double len = std::abs(b - a);
    if (len == 0.0) continue;
    const auto g = [&](double t) {
      const Complex w = a + t * (b - a);
      double v;
      try {
        v = field(w);
      } catch (const EvalError&) {
        throw SingularityOnPath("line integrand singular near (" +
                                std::to_string(w.real()) + ", " +
                                std::to_string(w.imag()) + ")");
      }
      if (!std::isfinite(v))
        throw SingularityOnPath("line integrand not finite near (" +
                                std::to_string(w.real()) + ", " +
                                std::to_string(w.imag()) + ")");
      return v * len;
    };
    const double tol =
        std::max(cfg.abs_tol * (len / total_len), 1e-16);
    acc += adapt(g, 0.0, 1.0, tol, budget);
  }
  return acc;
}

double area_integral(const Region& region, const Region& exclusion,
                     const ScalarField& field, const QuadratureConfig& cfg) {
  if (exclusion.empty() || !region_contains(exclusion, {0.0, 0.0}))
    throw ExclusionMissing("area integral requires w = 0 inside the exclusion");

  const BBox bb = bounding_box(region);
  if (bb.empty()) return 0.0;
  SectionIndex reg_idx(region);
  SectionIndex exc_idx(exclusion);

  int budget = cfg.max_subdivisions;
  // Inner integral over the clipped section at fixed u.
  const auto column = [&](double u) {
    const CrossSection rs = reg_idx.section(u);
    if (rs.intervals.empty()) return 0.0;
    const CrossSection es = exc_idx.section(u);
    // subtract exclusion intervals from region intervals
    std::vector<Interval> keep;
    for (Interval iv : rs.intervals) {
      std::vector<Interval> cur{iv};
      for (const Interval& e : es.intervals) {
        std::vector<Interval> next;
        for (const Interval& c : cur) {
          if (e.hi <= c.lo || e.lo >= c.hi) {
            next.push_back(c);
            continue;
          }
          if (e.lo > c.lo) next.push_back({c.lo, e.lo});
          if (e.hi < c.hi) next.push_back({e.hi, c.hi});
        }
        cur = std::move(next);
      }
      for (const Interval& c : cur) keep.push_back(c);
    }
    double acc = 0.0;
    for (const Interval& c : keep) {
      if (c.length() <= 0.0) continue;
      const auto g = [&](double v) {
        const double val = field({u, v});
        if (!std::isfinite(val))
          throw SingularityOnPath("area integrand not finite near (" +
                                  std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
        return val;
      };
      int inner_budget = 400;
      acc += adapt(g, c.lo, c.hi,
                   std::max(cfg.abs_tol * 1e-3, 1e-16), inner_budget);
    }
    return acc;
  };

  const int ncols = std::max(
      4, (int)std::ceil((bb.xhi - bb.xlo) / std::max(cfg.area_cell, 1e-6)));
  const double w = (bb.xhi - bb.xlo) / ncols;
  double acc = 0.0;
  for (int k = 0; k < ncols; ++k) {
    const double a = bb.xlo + k * w;
    const double b = k + 1 == ncols ? bb.xhi : a + w;
    acc += adapt(column, a, b, std::max(cfg.abs_tol / ncols, 1e-16), budget);
  }
  return acc;
}

/*---------------------------------------------------------------------------
 * Layer slope inequality
 *---------------------------------------------------------------------------*/

bool minkowski_check(const std::vector<double>& grid_u,
                     const std::vector<std::vector<double>>& layers,
                     double tol) {
  if (layers.size() % 2 != 0 || layers.empty())
    throw OddLayerCount("layer count must be a positive even number");
  const std::size_t n = grid_u.size();
  if (n < 2) throw DomainError("layer grid needs at least two points");
  for (const auto& l : layers)
    if (l.size() != n) throw DomainError("layer/grid size mismatch");
  for (std::size_t c = 0; c + 1 < layers.size(); ++c)
    for (std::size_t i = 0; i < n; ++i)
      if (layers[c + 1][i] > layers[c][i] + 1e-12)
        throw DomainError("layers are not interlaced");

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double du = grid_u[i + 1] - grid_u[i];
    if (!(du > 0.0)) throw DomainError("layer grid must increase");
    double lhs = 0.0, alt = 0.0;
    for (std::size_t c = 0; c < layers.size(); ++c) {
      const double s = (layers[c][i + 1] - layers[c][i]) / du;
      lhs += std::sqrt(1.0 + s * s);
      alt += (c % 2 == 0 ? s : -s);
    }
    const double star = 0.5 * alt;
    const double rhs = 2.0 * std::sqrt(1.0 + star * star);
    if (lhs < rhs - tol * std::max(1.0, rhs)) return false;
  }
  return true;
}

}  // namespace vertcover
