#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vertcover/geometry.hpp"
#include "vertcover/slab.hpp"

namespace vertcover {

// Ordered so that serialized reports are byte-stable across runs.
using Json = nlohmann::ordered_json;

/*---------------------------------------------------------------------------
 * Region files
 *---------------------------------------------------------------------------*/

// {"shells": [[[x, y], ...], ...], "holes": [...]}  (closed rings, no
// repeated last vertex).
Json region_to_json(const Region& region);
Region region_from_json(const Json& j);  // IoError on malformed shape

Region load_region_file(const std::string& path);  // IoError
void save_region_file(const std::string& path, const Region& region);

/*---------------------------------------------------------------------------
 * Decomposition dump
 *---------------------------------------------------------------------------*/

Json decomposition_to_json(const Decomposition& dec);

/*---------------------------------------------------------------------------
 * JSON utilities
 *---------------------------------------------------------------------------*/

// 2-space indent plus trailing newline; the one dump used everywhere so
// artifacts are byte-comparable.
std::string dump_json(const Json& j);

// Copy with every "timings" object removed, at any depth.  Golden
// comparisons run on the stripped form.
Json strip_timings(Json j);
bool same_modulo_timings(const Json& a, const Json& b);

// Write-temp-then-rename so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);  // IoError

/*---------------------------------------------------------------------------
 * SVG figures
 *---------------------------------------------------------------------------*/

struct SvgStyle {
  std::string stroke = "#30618c";
  double stroke_width = 1.5;
  std::string fill = "none";
  double opacity = 1.0;
};

// Accumulates primitives in problem coordinates and renders them into a
// fixed-size picture with the y-axis pointing up.
class SvgFigure {
 public:
  void add_region(const Region& region, const SvgStyle& style);
  void add_polyline(const Polyline& poly, const SvgStyle& style);
  void add_segment(Complex a, Complex b, const SvgStyle& style);

  std::string render(int px_width = 640) const;

 private:
  struct Item {
    int kind;  // 0 region, 1 polyline, 2 segment
    Region region;
    Polyline poly;
    Complex a, b;
    SvgStyle style;
  };
  std::vector<Item> items_;
};

// Fixed palette shared by the CLI figures.
namespace palette {
inline constexpr const char* kRegionFill = "#dce9f5";
inline constexpr const char* kRegionStroke = "#30618c";
inline constexpr const char* kSegment = "#c23b22";
inline constexpr const char* kCurve = "#2a7e43";
inline constexpr const char* kGhost = "#9aa7b4";
}  // namespace palette

}  // namespace vertcover
