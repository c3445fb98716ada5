#pragma once

#include <array>
#include <cstdint>

#include "vlpr/color.hpp"
#include "vlpr/image.hpp"

namespace vlpr {

using Histogram256 = std::array<std::uint64_t, 256>;

inline Histogram256 gray_histogram(const GrayImage& g) {
  Histogram256 h{};
  for (std::uint8_t v : g.values) ++h[v];
  return h;
}

/// Global threshold maximizing inter-class variance. Pixels strictly above the
/// returned level are foreground. The smallest maximizing level wins; a uniform
/// histogram returns its single level.
inline int otsu_threshold(const Histogram256& hist) {
  std::uint64_t total = 0;
  double sum_all = 0.0;
  int lo = -1, hi = -1;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    sum_all += static_cast<double>(i) * static_cast<double>(hist[i]);
    if (hist[i]) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (total == 0) return 0;
  if (lo == hi) return lo;

  double best = -1.0;
  int best_t = lo;
  std::uint64_t w0 = 0;
  double sum0 = 0.0;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
    const std::uint64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / static_cast<double>(w0);
    const double mu1 = (sum_all - sum0) / static_cast<double>(w1);
    const double between = static_cast<double>(w0) * static_cast<double>(w1) * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

inline BinaryImage threshold_at(const GrayImage& g, int level) {
  BinaryImage out(g.width, g.height);
  auto& bits = out.bits();
  for (std::size_t i = 0; i < g.values.size(); ++i) bits[i] = g.values[i] > level ? 1 : 0;
  return out;
}

inline BinaryImage threshold_binarize(const GrayImage& g) {
  return threshold_at(g, otsu_threshold(gray_histogram(g)));
}

inline BinaryImage threshold_binarize(const RasterImage& img) { return threshold_binarize(to_gray(img)); }

}  // namespace vlpr
