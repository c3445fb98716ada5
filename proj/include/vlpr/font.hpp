#pragma once

// Built-in stroke font for digits and the default letter set. Each character is
// a list of polylines in a unit box (x right, y down) rendered with round-capped
// strokes of a chosen thickness.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlpr/image.hpp"

namespace vlpr::font {

using Polyline = std::vector<PointF>;
using StrokeGlyph = std::vector<Polyline>;

namespace detail {

// Elliptical arc from a0 to a1 degrees (0 = east, 90 = south).
inline Polyline arc(double cx, double cy, double rx, double ry, double a0, double a1) {
  Polyline p;
  const int n = std::max(4, static_cast<int>(std::abs(a1 - a0) / 10.0));
  for (int i = 0; i <= n; ++i) {
    const double a = (a0 + (a1 - a0) * i / n) * std::numbers::pi / 180.0;
    p.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return p;
}

inline Polyline join(Polyline a, const Polyline& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Polyline line(std::initializer_list<PointF> pts) { return Polyline(pts); }

inline std::map<std::string, StrokeGlyph> build() {
  std::map<std::string, StrokeGlyph> f;
  f["0"] = {arc(0.5, 0.5, 0.5, 0.5, 0, 360)};
  f["1"] = {line({{0.15, 0.22}, {0.55, 0.0}, {0.55, 1.0}}), line({{0.15, 1.0}, {0.95, 1.0}})};
  f["2"] = {join(arc(0.5, 0.28, 0.48, 0.28, 200, 380), line({{0.0, 1.0}, {1.0, 1.0}}))};
  f["3"] = {join(arc(0.5, 0.25, 0.45, 0.25, 200, 450), arc(0.5, 0.75, 0.5, 0.25, 270, 520))};
  f["4"] = {line({{0.75, 1.0}, {0.75, 0.0}, {0.0, 0.7}, {1.0, 0.7}})};
  f["5"] = {join(line({{0.95, 0.0}, {0.1, 0.0}, {0.05, 0.45}}), arc(0.5, 0.68, 0.47, 0.32, 230, 500))};
  f["6"] = {arc(0.5, 0.5, 0.5, 0.5, 300, 120), arc(0.5, 0.7, 0.47, 0.3, 0, 360)};
  f["7"] = {line({{0.0, 0.0}, {1.0, 0.0}, {0.35, 1.0}})};
  f["8"] = {arc(0.5, 0.24, 0.3, 0.24, 0, 360), arc(0.5, 0.75, 0.5, 0.25, 0, 360)};
  f["9"] = {arc(0.5, 0.3, 0.47, 0.3, 0, 360), arc(0.5, 0.5, 0.5, 0.5, 0, 120)};
  f["A"] = {line({{0.0, 1.0}, {0.5, 0.0}, {1.0, 1.0}}), line({{0.22, 0.62}, {0.78, 0.62}})};
  f["B"] = {line({{0.05, 0.0}, {0.05, 1.0}}),
            join(join(line({{0.05, 0.0}}), arc(0.45, 0.24, 0.35, 0.24, 270, 390)), line({{0.4, 0.48}, {0.05, 0.48}})),
            join(join(line({{0.05, 0.48}, {0.4, 0.48}}), arc(0.5, 0.74, 0.47, 0.26, 330, 450)), line({{0.05, 1.0}}))};
  f["C"] = {arc(0.5, 0.5, 0.5, 0.5, 320, 40)};
  f["D"] = {line({{0.05, 0.0}, {0.6, 0.0}, {0.97, 0.3}, {0.97, 0.7}, {0.6, 1.0}, {0.05, 1.0}, {0.05, 0.0}})};
  f["E"] = {line({{1.0, 0.0}, {0.05, 0.0}, {0.05, 1.0}, {1.0, 1.0}}), line({{0.05, 0.5}, {0.8, 0.5}})};
  f["F"] = {line({{1.0, 0.0}, {0.05, 0.0}, {0.05, 1.0}}), line({{0.05, 0.48}, {0.8, 0.48}})};
  f["G"] = {arc(0.5, 0.5, 0.5, 0.5, 320, 0), line({{1.0, 0.55}, {0.55, 0.55}}), line({{1.0, 0.5}, {1.0, 0.95}})};
  f["H"] = {line({{0.0, 0.0}, {0.0, 1.0}}), line({{1.0, 0.0}, {1.0, 1.0}}), line({{0.0, 0.5}, {1.0, 0.5}})};
  f["J"] = {line({{0.3, 0.0}, {1.0, 0.0}}), join(line({{0.8, 0.0}}), arc(0.45, 0.7, 0.35, 0.3, 0, 160))};
  f["K"] = {line({{0.05, 0.0}, {0.05, 1.0}}), line({{1.0, 0.0}, {0.05, 0.6}}), line({{0.35, 0.42}, {1.0, 1.0}})};
  f["L"] = {line({{0.05, 0.0}, {0.05, 1.0}, {1.0, 1.0}})};
  f["M"] = {line({{0.0, 1.0}, {0.05, 0.0}, {0.5, 0.6}, {0.95, 0.0}, {1.0, 1.0}})};
  f["N"] = {line({{0.05, 1.0}, {0.05, 0.0}, {0.95, 1.0}, {0.95, 0.0}})};
  f["P"] = {join(join(line({{0.05, 1.0}, {0.05, 0.0}}), arc(0.55, 0.27, 0.42, 0.27, 270, 450)), line({{0.05, 0.54}}))};
  f["R"] = {join(join(line({{0.05, 1.0}, {0.05, 0.0}}), arc(0.55, 0.27, 0.42, 0.27, 270, 450)), line({{0.05, 0.54}})),
            line({{0.45, 0.54}, {1.0, 1.0}})};
  f["S"] = {join(arc(0.5, 0.25, 0.45, 0.25, 330, 90), arc(0.5, 0.75, 0.47, 0.25, 270, 510))};
  f["T"] = {line({{0.0, 0.0}, {1.0, 0.0}}), line({{0.5, 0.0}, {0.5, 1.0}})};
  f["U"] = {join(join(line({{0.05, 0.0}}), arc(0.5, 0.65, 0.45, 0.35, 180, 0)), line({{0.95, 0.0}}))};
  f["V"] = {line({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}})};
  f["W"] = {line({{0.0, 0.0}, {0.22, 1.0}, {0.5, 0.35}, {0.78, 1.0}, {1.0, 0.0}})};
  f["X"] = {line({{0.0, 0.0}, {1.0, 1.0}}), line({{1.0, 0.0}, {0.0, 1.0}})};
  f["Y"] = {line({{0.0, 0.0}, {0.5, 0.45}, {1.0, 0.0}}), line({{0.5, 0.45}, {0.5, 1.0}})};
  f["Z"] = {line({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}})};
  return f;
}

}  // namespace detail

inline const std::map<std::string, StrokeGlyph>& glyphs() {
  static const std::map<std::string, StrokeGlyph> table = detail::build();
  return table;
}

inline bool has_glyph(const std::string& label) { return glyphs().count(label) != 0; }

inline const StrokeGlyph& glyph(const std::string& label) {
  auto it = glyphs().find(label);
  if (it == glyphs().end()) throw std::invalid_argument("font has no glyph for '" + label + "'");
  return it->second;
}

/// Maps unit glyph coordinates into image space.
struct Placement {
  double x = 0.0;  // top-left of the glyph box, pixel-edge coordinates
  double y = 0.0;
  double width = 1.0;
  double height = 1.0;
  double thickness = 1.0;
  double shear = 0.0;  // x offset per unit of (y - 0.5), in box widths
};

/// Sets every pixel whose center lies within thickness/2 of a stroke.
template <class Plot>
void rasterize(const StrokeGlyph& g, const Placement& pl, int canvas_w, int canvas_h, Plot plot) {
  const double r = pl.thickness / 2.0;
  const double iw = std::max(pl.width - pl.thickness, 1e-6), ih = std::max(pl.height - pl.thickness, 1e-6);
  auto map = [&](PointF p) {
    return PointF{pl.x + r + (p.x + pl.shear * (p.y - 0.5)) * iw, pl.y + r + p.y * ih};
  };
  for (const Polyline& line : g) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const PointF a = map(line[i]);
      const PointF b = map(line[i + 1]);
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
      const int x1 = std::min(canvas_w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
      const int y1 = std::min(canvas_h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
      const double dx = b.x - a.x, dy = b.y - a.y, len2 = dx * dx + dy * dy;
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          double t = len2 > 0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
          if (ex * ex + ey * ey <= r * r) plot(x, y);
        }
      }
    }
  }
}

inline void draw(BinaryImage& canvas, const StrokeGlyph& g, const Placement& pl) {
  rasterize(g, pl, canvas.width(), canvas.height(), [&](int x, int y) { canvas.set(x, y); });
}

/// Canonical rendering: strokes 1/8 of the height on a canvas of the given size.
inline BinaryImage render(const std::string& label, int height, int width) {
  BinaryImage out(width, height);
  const double t = std::max(1.5, height / 8.0);
  draw(out, glyph(label), {0.0, 0.0, static_cast<double>(width), static_cast<double>(height), t, 0.0});
  return out;
}

}  // namespace vlpr::font
