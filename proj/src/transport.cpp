#include "vertcover/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vertcover/errors.hpp"

namespace vertcover {

namespace {

constexpr double kQuarterPi = kPi / 4.0;
constexpr double kMeasTiny = 1e-10;  // section measures below this count as 0

// v*(u): half the measure of the B(r) section inside the cell at abscissa u,
// clamped to the strip half-height (sections wider than the strip are carried
// as boundary segments, like the over-tall arcs they replace).
double half_section(const SlabCell& cell, const SectionIndex& br, double u) {
  const CrossSection sec = br.section(u);
  if (sec.intervals.empty()) return 0.0;
  double m = 0.0;
  for (const Interval& part : cell.parts_at(u)) m += sec.overlap(part);
  return std::min(0.5 * m, kQuarterPi);
}

// Rightmost abscissa in [cell.a, cell.b] whose B(r) section in the cell is
// positive.  The positive set is anchored at the left wall, so a right-to-left
// scan brackets the sign change and bisection sharpens it.
double rightmost_positive(const SlabCell& cell, const SectionIndex& br,
                          double va) {
  const double a = cell.a, b = cell.b;
  const int kScan = 64;
  double lo = a, hi = b;
  bool found = false;
  for (int j = kScan - 1; j >= 1; --j) {
    const double u = a + (b - a) * j / kScan;
    if (half_section(cell, br, u) > kMeasTiny) {
      lo = u;
      hi = a + (b - a) * (j + 1) / kScan;
      found = true;
      break;
    }
  }
  if (!found) {
    if (va <= kMeasTiny) return a;
    hi = a + (b - a) / kScan;
  }
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (half_section(cell, br, mid) > kMeasTiny ? lo : hi) = mid;
  }
  return lo;
}

int kind_rank(GammaKind k) {
  switch (k) {
    case GammaKind::SpansSlab: return 2;
    case GammaKind::HitsAxis: return 1;
    default: return 0;
  }
}

// The lifted sample polyline of one cell at a given leftward shift.
Polyline piece_polyline(const CellTransport& ct, double shift) {
  Polyline p;
  p.pts.reserve(ct.us.size());
  for (std::size_t i = 0; i < ct.us.size(); ++i)
    p.pts.emplace_back(ct.sigma + ct.us[i] - shift,
                       std::min(kQuarterPi, ct.v_star[i] + ct.lift));
  return p;
}

double metric_length(const Polyline& p) {
  return line_integral(p, [](Complex w) { return mu(w); });
}

}  // namespace

const CellTransport* TransportPlan::by_cell(int cell_id) const {
  for (const auto& c : cells)
    if (c.cell_id == cell_id) return &c;
  return nullptr;
}

/*---------------------------------------------------------------------------
 * Transport construction
 *---------------------------------------------------------------------------*/

TransportPlan build_transport(const Decomposition& dec, const Region& br_work,
                              double rho, double r, int samples_per_cell) {
  if (!(r > 0.0) || !(r < rho)) {
    std::ostringstream os;
    os << "transport needs 0 < r < rho; got r=" << r << " rho=" << rho;
    throw DomainError(os.str());
  }
  if (dec.ordered.empty())
    throw NoOriginCell("decomposition has no ordered cells");
  const SectionIndex br(br_work);

  TransportPlan plan;
  plan.side = dec.side;
  plan.rho = rho;
  plan.r = r;

  // Classify each ordered cell and sample v* on [a, b(r)].
  for (int id : dec.ordered) {
    const SlabCell& cell = dec.cells[(std::size_t)id];
    CellTransport ct;
    ct.cell_id = id;
    ct.a = cell.a;
    ct.b_rho = cell.b;
    const double va = half_section(cell, br, cell.a);
    const double vb = half_section(cell, br, cell.b);
    bool touched = va > kMeasTiny || vb > kMeasTiny;
    for (int j = 1; j <= 8 && !touched; ++j)
      touched =
          half_section(cell, br, cell.a + (cell.b - cell.a) * j / 9.0) >
          kMeasTiny;
    if (!touched) {
      ct.kind = GammaKind::Empty;
      ct.b_r = cell.a;
    } else if (vb > kMeasTiny) {
      ct.kind = GammaKind::SpansSlab;
      ct.b_r = cell.b;
    } else {
      ct.kind = GammaKind::HitsAxis;
      ct.b_r = rightmost_positive(cell, br, va);
    }
    if (ct.kind != GammaKind::Empty) {
      const int n = std::max(2, samples_per_cell);
      ct.us.resize((std::size_t)n + 1);
      ct.v_star.resize((std::size_t)n + 1);
      for (int i = 0; i <= n; ++i) {
        const double u = ct.a + (ct.b_r - ct.a) * i / n;
        ct.us[(std::size_t)i] = u;
        ct.v_star[(std::size_t)i] = half_section(cell, br, u);
      }
      // An axis-hitting piece closes exactly onto v = 0 at its right end.
      if (ct.kind == GammaKind::HitsAxis) ct.v_star.back() = 0.0;
    }
    plan.cells.push_back(std::move(ct));
  }

  const int n = (int)plan.cells.size();

  // k' = first axis-hitting piece, n' = last nonempty one (1-based).  The
  // expected kind pattern is spans..., hits-axis..., empty...; deviations are
  // recorded, not fatal.
  plan.n_prime = 0;
  for (int k = 1; k <= n; ++k)
    if (plan.cells[(std::size_t)k - 1].kind != GammaKind::Empty)
      plan.n_prime = k;
  plan.k_prime = plan.n_prime;
  for (int k = 1; k <= n; ++k)
    if (plan.cells[(std::size_t)k - 1].kind == GammaKind::HitsAxis) {
      plan.k_prime = k;
      break;
    }
  plan.pattern_ok = true;
  for (int k = 1; k < n; ++k)
    if (kind_rank(plan.cells[(std::size_t)k - 1].kind) <
        kind_rank(plan.cells[(std::size_t)k].kind))
      plan.pattern_ok = false;

  // Chain the horizontal translations: cell 1's left wall lands at 0, and
  // each translated cell starts where the previous one ends.
  for (int k = 0; k < n; ++k) {
    auto& ct = plan.cells[(std::size_t)k];
    ct.sigma = k == 0 ? -ct.a
                      : plan.cells[(std::size_t)k - 1].sigma +
                            plan.cells[(std::size_t)k - 1].b_rho - ct.a;
  }
  if (plan.n_prime == 0) return plan;  // B(r) misses every cell

  // Lift amounts from the chained section sums, accumulated right to left so
  // that consecutive pieces join at exactly equal heights.
  const int np = plan.n_prime;
  std::vector<double> suf_a((std::size_t)np + 2, 0.0);
  std::vector<double> suf_b((std::size_t)np + 2, 0.0);
  for (int k = np; k >= 1; --k) {
    const auto& ct = plan.cells[(std::size_t)k - 1];
    suf_a[(std::size_t)k] =
        suf_a[(std::size_t)k + 1] + (ct.us.empty() ? 0.0 : ct.v_star.front());
    suf_b[(std::size_t)k] =
        suf_b[(std::size_t)k + 1] + (ct.us.empty() ? 0.0 : ct.v_star.back());
  }
  for (int k = 1; k <= np; ++k) {
    auto& ct = plan.cells[(std::size_t)k - 1];
    ct.lift = suf_a[(std::size_t)k + 1] - suf_b[(std::size_t)k];
    if (ct.lift < -1e-9) {
      std::ostringstream os;
      os << "lift " << ct.lift << " at ordered cell " << k << " (id "
         << ct.cell_id << "), r=" << r << " rho=" << rho;
      throw LiftNegative(os.str());
    }
    ct.lift = std::max(ct.lift, 0.0);
  }

  // Assemble the lifted pieces: gamma' keeps them at their chained abscissas,
  // gamma* additionally closes the axis gaps by leftward translations.
  double shift = 0.0;
  const double dedupe = 1e-12;
  for (int k = 1; k <= np; ++k) {
    auto& ct = plan.cells[(std::size_t)k - 1];
    if (k >= 2) {
      const auto& prev = plan.cells[(std::size_t)k - 2];
      shift += prev.b_rho - prev.b_r;
    }
    ct.left_shift = shift;
    if (ct.kind == GammaKind::Empty) continue;
    bool first = true;
    for (std::size_t i = 0; i < ct.us.size(); ++i) {
      const double y = std::min(kQuarterPi, ct.v_star[i] + ct.lift);
      const Complex q(ct.sigma + ct.us[i], y);
      const Complex s(q.real() - shift, y);
      if (first && !plan.gamma_star.pts.empty() &&
          std::abs(s - plan.gamma_star.pts.back()) > 1e-6) {
        std::ostringstream os;
        os << "piece " << k << " starts at (" << s.real() << ", " << s.imag()
           << ") but the previous piece ends at ("
           << plan.gamma_star.pts.back().real() << ", "
           << plan.gamma_star.pts.back().imag() << ")";
        throw AssemblyGap(os.str());
      }
      first = false;
      if (plan.gamma_prime.pts.empty() ||
          std::abs(q - plan.gamma_prime.pts.back()) > dedupe)
        plan.gamma_prime.pts.push_back(q);
      if (plan.gamma_star.pts.empty() ||
          std::abs(s - plan.gamma_star.pts.back()) > dedupe)
        plan.gamma_star.pts.push_back(s);
    }
  }
  plan.total_shift = shift;

  // Metric-length drift of each translated piece; the closing translations
  // only affect pieces at or beyond the first axis hit.
  double drift = 0.0;
  for (int k = 2; k <= np; ++k) {
    const auto& ct = plan.cells[(std::size_t)k - 1];
    if (ct.kind == GammaKind::Empty || ct.left_shift <= 0.0 ||
        ct.us.size() < 2)
      continue;
    drift = std::max(drift, std::abs(metric_length(piece_polyline(
                                         ct, ct.left_shift)) -
                                     metric_length(piece_polyline(ct, 0.0))));
  }
  plan.eps_prime = drift;
  plan.eps_total = 2.0 * drift * std::max(0, plan.n_prime - plan.k_prime);
  return plan;
}

/*---------------------------------------------------------------------------
 * Transported metric
 *---------------------------------------------------------------------------*/

double mu_plus(Complex w, const TransportPlan& plan,
               const Decomposition& dec) {
  const SlabCell* cell = dec.cell_at(w.real(), w.imag());
  if (cell == nullptr || !cell->reachable) return 0.0;
  const CellTransport* ct = plan.by_cell(cell->id);
  if (ct == nullptr || ct->kind == GammaKind::Empty || ct->us.size() < 2)
    return 0.0;
  const double u = w.real();
  if (u > ct->b_r + 1e-12) return 0.0;
  const double span = ct->us.back() - ct->us.front();
  double vs;
  if (span <= 0.0) {
    vs = ct->v_star.front();
  } else {
    double t = (u - ct->us.front()) / span * (double)(ct->us.size() - 1);
    t = std::clamp(t, 0.0, (double)(ct->us.size() - 1));
    const std::size_t i =
        std::min((std::size_t)t, ct->us.size() - 2);
    const double frac = t - (double)i;
    vs = ct->v_star[i] + frac * (ct->v_star[i + 1] - ct->v_star[i]);
  }
  const double v = std::clamp(vs, 0.0, kQuarterPi - 1e-12);
  return mu(Complex(ct->sigma + u, v));
}

std::vector<Polyline> positive_boundary_arcs(const Region& region) {
  std::vector<Polyline> arcs;
  auto cross_at_axis = [](const Complex& p, const Complex& q) {
    const double t = (0.0 - p.real()) / (q.real() - p.real());
    return Complex(0.0, p.imag() + t * (q.imag() - p.imag()));
  };
  auto process = [&](const std::vector<Complex>& ring) {
    if (ring.size() < 3) return;
    bool any_pos = false, any_neg = false;
    for (const auto& p : ring) (p.real() >= 0.0 ? any_pos : any_neg) = true;
    if (!any_pos) return;
    if (!any_neg) {
      Polyline whole;
      whole.pts = ring;
      whole.closed = true;
      arcs.push_back(std::move(whole));
      return;
    }
    const std::size_t n = ring.size();
    std::size_t start = 0;
    while (ring[start].real() >= 0.0) ++start;
    Polyline cur;
    auto flush = [&] {
      if (cur.pts.size() >= 2) arcs.push_back(cur);
      cur.pts.clear();
    };
    Complex prev = ring[start];
    for (std::size_t step = 1; step <= n; ++step) {
      const Complex q = ring[(start + step) % n];
      const bool in_prev = prev.real() >= 0.0;
      const bool in_q = q.real() >= 0.0;
      if (!in_prev && in_q) {
        const Complex x = q.real() > 0.0 ? cross_at_axis(prev, q) : q;
        cur.pts.push_back(x);
        if (std::abs(q - x) > 0.0) cur.pts.push_back(q);
      } else if (in_prev && in_q) {
        cur.pts.push_back(q);
      } else if (in_prev && !in_q) {
        cur.pts.push_back(cross_at_axis(prev, q));
        flush();
      }
      prev = q;
    }
    flush();
  };
  for (const auto& s : region.shells) process(s);
  for (const auto& h : region.holes) process(h);
  return arcs;
}

/*---------------------------------------------------------------------------
 * Side bundling and the quantitative checks
 *---------------------------------------------------------------------------*/

SideTransport make_side_transport(const AnalyticMap& f, double rho, double r,
                                  double delta, Side side, double trace_tol) {
  if (!(r > 0.0 && r < rho && rho <= f.max_radius() && rho < 1.0)) {
    std::ostringstream os;
    os << "need 0 < r < rho < 1 within the map's radius; got r=" << r
       << " rho=" << rho;
    throw DomainError(os.str());
  }
  const LineSystem lines = build_line_system(f, rho, delta);
  SideTransport st;
  st.dec = decompose(level_region(f, rho, trace_tol), lines, side);
  assign_r_and_order(st.dec, f, rho);
  st.br = level_region(f, r, trace_tol, side);
  st.plan = build_transport(st.dec, st.br, rho, r);
  return st;
}

namespace {

// Integral of the transported metric over the u >= 0 boundary of B(r),
// working coordinates.
double half_curve_integral(const SideTransport& st,
                           const QuadratureConfig& cfg) {
  const auto field = [&st](Complex w) { return mu_plus(w, st.plan, st.dec); };
  double acc = 0.0;
  for (const Polyline& arc : positive_boundary_arcs(st.br))
    acc += line_integral(arc, field, cfg);
  return acc;
}

}  // namespace

Prop3Result prop3_lower_bound(const AnalyticMap& f, double r, double rho,
                              double delta, const QuadratureConfig& cfg) {
  const SideTransport st =
      make_side_transport(f, rho, r, delta, Side::Positive);
  Prop3Result res;
  res.value = half_curve_integral(st, cfg);
  res.eps_report = std::max(0.0, 0.5 - res.value);
  return res;
}

double containment_radius(const AnalyticMap& f, double r0, double trace_tol) {
  const Region b0 = level_region(f, r0, trace_tol);
  const SectionIndex idx(b0);
  const AnalyticMap p = strip_map();
  const auto contained = [&](double rp) {
    const Polyline c = trace_level_curve(p, rp, trace_tol);
    for (const Complex& w : c.pts)
      if (!idx.contains(w)) return false;
    return true;
  };
  double lo = 1e-4;
  if (!contained(lo)) {
    std::ostringstream os;
    os << "no strip level region of radius >= 1e-4 fits inside B(" << r0
       << ", f=" << f.name << ")";
    throw NoContainmentRadius(os.str());
  }
  // The strip region reaches u = atanh(rp), so rp cannot beat the image's
  // rightmost extent; start the bracket just past it.
  double hi = std::min(1.0 - 1e-9,
                       std::tanh(max_real_on_circle(f, r0)) + 1e-6);
  if (hi <= lo) return lo;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (contained(mid) ? lo : hi) = mid;
  }
  return lo;
}

Prop4Result prop4_upper_bound(const AnalyticMap& f, double r0, double rho,
                              double delta, const QuadratureConfig& cfg) {
  if (!(r0 > 0.0 && r0 < rho))
    throw DomainError("prop4 needs 0 < r0 < rho");
  const double trace_tol = 3e-4;
  Prop4Result res;
  res.r0_prime = containment_radius(f, r0, trace_tol);

  const LineSystem lines = build_line_system(f, rho, delta);
  Decomposition dec =
      decompose(level_region(f, rho, trace_tol), lines, Side::Positive);
  assign_r_and_order(dec, f, rho);
  const SectionIndex idx0(level_region(f, r0, trace_tol));

  double total_w = 0.0;
  for (int id : dec.ordered)
    total_w += dec.cells[(std::size_t)id].b - dec.cells[(std::size_t)id].a;
  total_w = std::max(total_w, 1e-12);

  // Per cell: the v-integral of mu^2 over the symmetrized section annulus
  // [M0/2, M/2] doubles to account for the two symmetric halves; chaining
  // sigma exactly as the transport does places the cell on the real axis.
  const double vmax = kQuarterPi - 1e-12;
  double sigma = 0.0, prev_b = 0.0;
  bool first = true;
  double value = 0.0;
  for (int id : dec.ordered) {
    const SlabCell& cell = dec.cells[(std::size_t)id];
    sigma = first ? -cell.a : sigma + prev_b - cell.a;
    first = false;
    prev_b = cell.b;
    const double inner_tol = std::max(1e-13, cfg.abs_tol * 1e-3);
    const auto column = [&](double u) {
      double m = 0.0, m0 = 0.0;
      const CrossSection sec0 = idx0.section(u);
      for (const Interval& part : cell.parts_at(u)) {
        m += part.length();
        m0 += sec0.overlap(part);
      }
      const double y1 = std::min(0.5 * m, vmax);
      const double y0 = std::min(0.5 * m0, y1);
      if (!(y1 - y0 > 0.0)) return 0.0;
      const double x = sigma + u;
      const auto mu2 = [x](double v) {
        const double g = mu(Complex(x, v));
        return g * g;
      };
      return 2.0 * adaptive_integral(mu2, y0, y1, inner_tol, 400);
    };
    const double cell_tol =
        std::max(1e-12, cfg.abs_tol * (cell.b - cell.a) / total_w);
    value += adaptive_integral(column, cell.a, cell.b, cell_tol,
                               cfg.max_subdivisions);
  }
  res.value = value;
  res.bound = -std::log(res.r0_prime) / (4.0 * kPi);
  res.bound_r0 = -std::log(r0) / (4.0 * kPi);
  res.holds = res.value <= res.bound + cfg.abs_tol;
  return res;
}

Eq5Result eq5_excess(const AnalyticMap& f, double r, double rho, double delta,
                     const QuadratureConfig& cfg) {
  const SideTransport pos =
      make_side_transport(f, rho, r, delta, Side::Positive);
  const SideTransport neg =
      make_side_transport(f, rho, r, delta, Side::Negative);
  Eq5Result res;
  res.value = half_curve_integral(pos, cfg) + half_curve_integral(neg, cfg);
  res.t_excess = res.value - 1.0;
  return res;
}

/*---------------------------------------------------------------------------
 * Rigidity and the closing chain
 *---------------------------------------------------------------------------*/

SchwarzResult schwarz_rigidity_check(const AnalyticMap& f, double r,
                                     Complex c) {
  if (std::abs(c.real()) > 1e-12)
    throw DomainError("the shift c must be purely imaginary");
  if (!(r > 0.0 && r < f.max_radius()))
    throw DomainError("schwarz check needs 0 < r < map radius");

  const int n = 720;
  std::vector<Complex> w((std::size_t)n);
  const auto shifted = [&](double phi) {
    return f.eval(Complex(r * std::cos(phi), r * std::sin(phi))) + c;
  };
  double umax = -1e300, umin = 1e300;
  double phi_max = 0.0, phi_min = 0.0;
  for (int j = 0; j < n; ++j) {
    const double phi = 2.0 * kPi * j / n;
    w[(std::size_t)j] = shifted(phi);
    const double u = w[(std::size_t)j].real();
    if (std::abs(w[(std::size_t)j].imag()) > kQuarterPi + 1e-9)
      throw NotATranslate("the shifted level curve leaves the strip");
    if (u > umax) {
      umax = u;
      phi_max = phi;
    }
    if (u < umin) {
      umin = u;
      phi_min = phi;
    }
  }
  // Sharpen both extents by golden-section around the best grid nodes.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  const auto polish = [&](double phi0, double sign) {
    double a = phi0 - 2.0 * kPi / n, b = phi0 + 2.0 * kPi / n;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = sign * shifted(x1).real(), f2 = sign * shifted(x2).real();
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = sign * shifted(x2).real();
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = sign * shifted(x1).real();
      }
    }
    return sign * std::max(f1, f2);
  };
  umax = std::max(umax, polish(phi_max, 1.0));
  umin = std::min(umin, -polish(phi_min, -1.0));
  const double scale = std::max(1.0, std::abs(umax));
  if (!(umax > 0.0) || std::abs(umax + umin) > 1e-6 * scale)
    throw NotATranslate("the level curve extents are not u-symmetric");

  SchwarzResult res;
  res.r_prime = std::tanh(umax);
  const Complex a_pt = std::tanh(c);
  const double rp2 = res.r_prime * res.r_prime;
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    const Complex zeta = std::tanh(w[(std::size_t)j]);
    if (std::abs(std::abs(zeta) - res.r_prime) >
        1e-6 * std::max(0.1, res.r_prime))
      throw NotATranslate("the shifted curve is not a strip level curve");
    const Complex g = rp2 * (zeta - a_pt) / (rp2 - zeta * std::conj(a_pt));
    sup = std::max(sup, std::abs(g) / r);
  }
  res.sup_ratio = sup;
  return res;
}

std::vector<ChainRow> contradiction_chain(const AnalyticMap& f, double rho,
                                          const std::vector<double>& r0_list,
                                          double r1, double r2, double delta) {
  if (!(r1 > 0.0 && r1 < r2 && r2 < rho))
    throw DomainError("need 0 < r1 < r2 < rho");
  const QuadratureConfig cfg = QuadratureConfig::line_defaults();
  double eps = 0.0;
  double t = 1e300;
  for (const double rr : {r1, 0.5 * (r1 + r2), r2}) {
    double full = 0.0;
    for (const Side side : {Side::Positive, Side::Negative}) {
      const SideTransport st = make_side_transport(f, rho, rr, delta, side);
      const double half = half_curve_integral(st, cfg);
      eps = std::max(eps, std::max(0.0, 0.5 - half));
      full += half;
    }
    t = std::min(t, full - 1.0);
  }

  std::vector<ChainRow> rows;
  rows.reserve(r0_list.size());
  for (const double r0 : r0_list) {
    if (!(r0 > 0.0 && r0 < r1))
      throw DomainError("each r0 must sit in (0, r1)");
    ChainRow row;
    row.r0 = r0;
    row.r0_prime = containment_radius(f, r0);
    row.eps = eps;
    row.t = t;
    row.lhs = -std::log(row.r0_prime) / (2.0 * kPi);
    row.rhs = (1.0 - 4.0 * eps) / (2.0 * kPi) * std::log(rho / r0) +
              (t + 2.0 * eps) / kPi * std::log(r2 / r1);
    row.gap = row.lhs - row.rhs;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vertcover
