#include "vertcover/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vertcover/errors.hpp"

namespace vertcover {

namespace fs = std::filesystem;

/*---------------------------------------------------------------------------
 * Region files
 *---------------------------------------------------------------------------*/

namespace {

Json ring_to_json(const std::vector<Complex>& ring) {
  Json out = Json::array();
  for (const Complex& p : ring) out.push_back({p.real(), p.imag()});
  return out;
}

std::vector<Complex> ring_from_json(const Json& j) {
  if (!j.is_array() || j.size() < 3)
    throw IoError("region ring must be an array of at least 3 points");
  std::vector<Complex> ring;
  ring.reserve(j.size());
  for (const Json& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number())
      throw IoError("region point must be a [x, y] number pair");
    ring.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return ring;
}

}  // namespace

Json region_to_json(const Region& region) {
  Json j;
  j["shells"] = Json::array();
  for (const auto& s : region.shells) j["shells"].push_back(ring_to_json(s));
  j["holes"] = Json::array();
  for (const auto& h : region.holes) j["holes"].push_back(ring_to_json(h));
  return j;
}

Region region_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("shells"))
    throw IoError("region file must be an object with a \"shells\" array");
  Region r;
  for (const Json& s : j.at("shells")) {
    auto ring = ring_from_json(s);
    if (signed_ring_area(ring) < 0.0)  // normalize: shells CCW
      std::reverse(ring.begin(), ring.end());
    r.shells.push_back(std::move(ring));
  }
  if (j.contains("holes")) {
    for (const Json& h : j.at("holes")) {
      auto ring = ring_from_json(h);
      if (signed_ring_area(ring) > 0.0)  // holes CW
        std::reverse(ring.begin(), ring.end());
      r.holes.push_back(std::move(ring));
    }
  }
  if (r.shells.empty()) throw IoError("region file has no shells");
  r.snap_tol = 1e-9 * bounding_box(r).diameter();
  return r;
}

Region load_region_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw IoError("cannot parse region file " + path + ": " + e.what());
  }
  return region_from_json(j);
}

void save_region_file(const std::string& path, const Region& region) {
  write_text_atomic(path, dump_json(region_to_json(region)));
}

/*---------------------------------------------------------------------------
 * Decomposition dump
 *---------------------------------------------------------------------------*/

Json decomposition_to_json(const Decomposition& dec) {
  Json j;
  j["schema"] = 1;
  j["side"] = dec.side == Side::Positive ? "positive" : "negative";
  j["rho"] = dec.rho;
  j["lines"] = dec.line_u;
  j["origin_cell"] = dec.origin_cell;
  j["ordered"] = dec.ordered;
  j["cells"] = Json::array();
  for (const SlabCell& c : dec.cells) {
    Json jc;
    jc["id"] = c.id;
    jc["slab"] = c.slab;
    jc["interval"] = {c.a, c.b};
    jc["r_cell"] = c.r_of_D;
    jc["reachable"] = c.reachable;
    jc["order"] = c.order;
    jc["pred"] = c.pred;
    jc["alpha"] = c.alpha.v.empty() ? Json::array()
                                    : Json{c.alpha.v.lo, c.alpha.v.hi};
    jc["beta"] = c.beta.v.empty() ? Json::array()
                                  : Json{c.beta.v.lo, c.beta.v.hi};
    jc["polygon"] = ring_to_json(c.polygon().pts);
    j["cells"].push_back(std::move(jc));
  }
  return j;
}

/*---------------------------------------------------------------------------
 * JSON utilities
 *---------------------------------------------------------------------------*/

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json strip_timings(Json j) {
  if (j.is_object()) {
    j.erase("timings");
    for (auto& [key, value] : j.items()) value = strip_timings(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timings(value);
  }
  return j;
}

bool same_modulo_timings(const Json& a, const Json& b) {
  return strip_timings(a) == strip_timings(b);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out.flush()) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " into place: " +
                  ec.message());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/*---------------------------------------------------------------------------
 * SVG figures
 *---------------------------------------------------------------------------*/

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void SvgFigure::add_region(const Region& region, const SvgStyle& style) {
  Item it;
  it.kind = 0;
  it.region = region;
  it.style = style;
  items_.push_back(std::move(it));
}

void SvgFigure::add_polyline(const Polyline& poly, const SvgStyle& style) {
  Item it;
  it.kind = 1;
  it.poly = poly;
  it.style = style;
  items_.push_back(std::move(it));
}

void SvgFigure::add_segment(Complex a, Complex b, const SvgStyle& style) {
  Item it;
  it.kind = 2;
  it.a = a;
  it.b = b;
  it.style = style;
  items_.push_back(std::move(it));
}

std::string SvgFigure::render(int px_width) const {
  BBox bb;
  for (const Item& it : items_) {
    switch (it.kind) {
      case 0: {
        const BBox rb = bounding_box(it.region);
        if (!rb.empty()) {
          bb.expand({rb.xlo, rb.ylo});
          bb.expand({rb.xhi, rb.yhi});
        }
        break;
      }
      case 1:
        for (const Complex& p : it.poly.pts) bb.expand(p);
        break;
      case 2:
        bb.expand(it.a);
        bb.expand(it.b);
        break;
    }
  }
  if (bb.empty()) bb = {0, 1, 0, 1};
  const double pad = 0.05 * std::max(bb.diameter(), 1e-9);
  const double w = bb.width() + 2 * pad, h = bb.height() + 2 * pad;
  const double scale = px_width / w;
  const int px_height = std::max(1, (int)std::lround(h * scale));

  const auto X = [&](double x) { return fmt((x - bb.xlo + pad) * scale); };
  const auto Y = [&](double y) {
    return fmt(px_height - (y - bb.ylo + pad) * scale);  // y up
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px_width
      << "\" height=\"" << px_height << "\" viewBox=\"0 0 " << px_width << " "
      << px_height << "\">\n";
  for (const Item& it : items_) {
    const SvgStyle& s = it.style;
    const std::string common = "stroke=\"" + s.stroke + "\" stroke-width=\"" +
                               fmt(s.stroke_width) + "\" opacity=\"" +
                               fmt(s.opacity) + "\"";
    if (it.kind == 0) {
      // One path with evenodd fill so holes punch out of their shells.
      std::ostringstream d;
      for (const auto& ring : it.region.shells) {
        for (std::size_t i = 0; i < ring.size(); ++i)
          d << (i == 0 ? "M" : "L") << X(ring[i].real()) << ","
            << Y(ring[i].imag());
        d << "Z";
      }
      for (const auto& ring : it.region.holes) {
        for (std::size_t i = 0; i < ring.size(); ++i)
          d << (i == 0 ? "M" : "L") << X(ring[i].real()) << ","
            << Y(ring[i].imag());
        d << "Z";
      }
      svg << "  <path d=\"" << d.str() << "\" fill=\"" << s.fill
          << "\" fill-rule=\"evenodd\" " << common << "/>\n";
    } else if (it.kind == 1) {
      svg << "  <" << (it.poly.closed ? "polygon" : "polyline")
          << " points=\"";
      for (std::size_t i = 0; i < it.poly.pts.size(); ++i) {
        if (i) svg << " ";
        svg << X(it.poly.pts[i].real()) << "," << Y(it.poly.pts[i].imag());
      }
      svg << "\" fill=\"" << s.fill << "\" " << common << "/>\n";
    } else {
      svg << "  <line x1=\"" << X(it.a.real()) << "\" y1=\"" << Y(it.a.imag())
          << "\" x2=\"" << X(it.b.real()) << "\" y2=\"" << Y(it.b.imag())
          << "\" " << common << "/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vertcover
