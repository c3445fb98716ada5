#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vlpr/image.hpp"

namespace vlpr {

/// Hue in [0,1) (wraps), saturation and value in [0,1].
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

/// Hexcone conversion. Gray inputs give s == 0 and h == 0 exactly.
constexpr HsvPixel rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  HsvPixel out;
  out.v = mx / 255.0;
  if (mx == mn) return out;
  const double delta = mx - mn;
  out.s = delta / mx;
  double h = 0.0;
  if (mx == r) {
    h = (g - b) / delta;
    if (h < 0.0) h += 6.0;
  } else if (mx == g) {
    h = (b - r) / delta + 2.0;
  } else {
    h = (r - g) / delta + 4.0;
  }
  out.h = h / 6.0;
  if (out.h >= 1.0) out.h -= 1.0;
  return out;
}

inline HsvPixel rgb_to_hsv(Rgb p) { return rgb_to_hsv(p.r, p.g, p.b); }

/// Inverse of rgb_to_hsv up to 8-bit rounding. Used by the scene renderer.
inline Rgb hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  s = std::clamp(s, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  const double hh = h * 6.0;
  const int sector = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r = v, g = t, b = p;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  auto to8 = [](double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

/// round(0.299 r + 0.587 g + 0.114 b) in exact integer arithmetic.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

inline std::uint8_t luma(Rgb p) { return luma(p.r, p.g, p.b); }

/// Grayscale view: one luma byte per pixel, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

inline GrayImage to_gray(const RasterImage& img) {
  GrayImage g{img.width(), img.height(), {}};
  g.values.reserve(img.size());
  for (const Rgb& p : img.pixels()) g.values.push_back(luma(p));
  return g;
}

}  // namespace vlpr
