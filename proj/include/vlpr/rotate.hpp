#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlpr/image.hpp"

namespace vlpr {

/// Canvas that holds a width x height image rotated by theta.
struct RotatedCanvas {
  int width = 0;
  int height = 0;
};

inline RotatedCanvas rotated_canvas(int width, int height, double theta) {
  const double c = std::abs(std::cos(theta)), s = std::abs(std::sin(theta));
  const int w = static_cast<int>(std::ceil(width * c + height * s - 1e-9));
  const int h = static_cast<int>(std::ceil(width * s + height * c - 1e-9));
  return {std::max(w, 1), std::max(h, 1)};
}

/// Where input pixel p lands after rotate(). Positive theta turns content
/// counter-clockwise as displayed (y axis pointing down).
inline PointF rotate_point(PointF p, double theta, int in_w, int in_h) {
  const RotatedCanvas out = rotated_canvas(in_w, in_h, theta);
  const double c = std::cos(theta), s = std::sin(theta);
  const double dx = p.x + 0.5 - in_w / 2.0, dy = p.y + 0.5 - in_h / 2.0;
  return {c * dx + s * dy + out.width / 2.0 - 0.5, -s * dx + c * dy + out.height / 2.0 - 0.5};
}

namespace detail {

template <class Image, class Pixel, class Get, class Set>
Image rotate_impl(const Image& img, double theta, Pixel fill, Get get, Set set) {
  if (std::abs(theta) > std::numbers::pi / 2 + 1e-12) throw std::invalid_argument("rotate: |theta| must be <= pi/2");
  const RotatedCanvas canvas = rotated_canvas(img.width(), img.height(), theta);
  Image out(canvas.width, canvas.height);
  const double c = std::cos(theta), s = std::sin(theta);
  const double hw = img.width() / 2.0, hh = img.height() / 2.0;
  for (int y = 0; y < canvas.height; ++y) {
    const double dy = y + 0.5 - canvas.height / 2.0;
    for (int x = 0; x < canvas.width; ++x) {
      const double dx = x + 0.5 - canvas.width / 2.0;
      const int sx = static_cast<int>(std::floor(c * dx - s * dy + hw));
      const int sy = static_cast<int>(std::floor(s * dx + c * dy + hh));
      if (sx >= 0 && sy >= 0 && sx < img.width() && sy < img.height()) set(out, x, y, get(img, sx, sy));
      else set(out, x, y, fill);
    }
  }
  return out;
}

}  // namespace detail

/// Nearest-neighbor rotation about the image center onto a canvas large enough
/// for the rotated content. Uncovered pixels are black.
inline RasterImage rotate(const RasterImage& img, double theta) {
  return detail::rotate_impl(
      img, theta, Rgb{}, [](const RasterImage& i, int x, int y) { return i.at(x, y); },
      [](RasterImage& o, int x, int y, Rgb v) { o.at(x, y) = v; });
}

inline BinaryImage rotate(const BinaryImage& img, double theta) {
  return detail::rotate_impl(
      img, theta, false, [](const BinaryImage& i, int x, int y) { return i.get(x, y); },
      [](BinaryImage& o, int x, int y, bool v) { o.set(x, y, v); });
}

}  // namespace vlpr
