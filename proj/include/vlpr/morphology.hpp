#pragma once

#include "vlpr/image.hpp"

namespace vlpr {

inline BinaryImage complement(const BinaryImage& img) {
  BinaryImage out = img;
  for (auto& b : out.bits()) b = b ? 0 : 1;
  return out;
}

namespace detail {

// One 3-tap pass of a separable 3x3 square element. For erosion the pixels
// beyond the border count as background; for dilation they contribute nothing.
template <bool Erode>
BinaryImage square3_pass(const BinaryImage& in, bool horizontal) {
  BinaryImage out(in.width(), in.height());
  const int w = in.width(), h = in.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool a = horizontal ? in.get_or_zero(x - 1, y) : in.get_or_zero(x, y - 1);
      const bool b = in.get(x, y);
      const bool c = horizontal ? in.get_or_zero(x + 1, y) : in.get_or_zero(x, y + 1);
      out.set(x, y, Erode ? (a && b && c) : (a || b || c));
    }
  }
  return out;
}

}  // namespace detail

inline BinaryImage erode(const BinaryImage& img) {
  return detail::square3_pass<true>(detail::square3_pass<true>(img, true), false);
}

inline BinaryImage dilate(const BinaryImage& img) {
  return detail::square3_pass<false>(detail::square3_pass<false>(img, true), false);
}

/// Erosion followed by dilation; removes specks narrower than 3 pixels.
inline BinaryImage opening(const BinaryImage& img) { return dilate(erode(img)); }

inline BinaryImage closing(const BinaryImage& img) { return erode(dilate(img)); }

}  // namespace vlpr
