#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlpr {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned pixel rectangle; x/y is the top-left corner.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const { return x + width; }
  int bottom() const { return y + height; }
  long long area() const { return static_cast<long long>(width) * height; }
  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(int px, int py) const { return px >= x && px < right() && py >= y && py < bottom(); }
  bool contains(const Rect& o) const {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect intersect(const Rect& a, const Rect& b) {
  int x0 = std::max(a.x, b.x);
  int y0 = std::max(a.y, b.y);
  int x1 = std::min(a.right(), b.right());
  int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

inline double iou(const Rect& a, const Rect& b) {
  const Rect i = intersect(a, b);
  const double inter = i.empty() ? 0.0 : static_cast<double>(i.area());
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major 8-bit RGB image.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ImageError("RasterImage: dimensions must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  Rect bounds() const { return {0, 0, width_, height_}; }
  std::size_t size() const { return pixels_.size(); }

  Rgb& at(int x, int y) {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  const Rgb& at(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

  const std::vector<Rgb>& pixels() const { return pixels_; }
  std::vector<Rgb>& pixels() { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

/// Row-major foreground flags, stored one byte per pixel (0 or 1).
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, bool fill = false) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ImageError("BinaryImage: dimensions must be positive");
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return bits_.empty(); }
  Rect bounds() const { return {0, 0, width_, height_}; }
  std::size_t size() const { return bits_.size(); }

  bool get(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  /// Out-of-range reads return background.
  bool get_or_zero(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::vector<std::uint8_t>& bits() { return bits_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

inline RasterImage crop(const RasterImage& img, const Rect& r) {
  const Rect c = intersect(r, img.bounds());
  if (c.empty()) throw ImageError("crop: rectangle outside image");
  RasterImage out(c.width, c.height);
  for (int y = 0; y < c.height; ++y)
    for (int x = 0; x < c.width; ++x) out.at(x, y) = img.at(c.x + x, c.y + y);
  return out;
}

inline BinaryImage crop(const BinaryImage& img, const Rect& r) {
  const Rect c = intersect(r, img.bounds());
  if (c.empty()) throw ImageError("crop: rectangle outside image");
  BinaryImage out(c.width, c.height);
  for (int y = 0; y < c.height; ++y)
    for (int x = 0; x < c.width; ++x) out.set(x, y, img.get(c.x + x, c.y + y));
  return out;
}

/// Minimal rectangle containing every foreground pixel; empty rect if none.
inline Rect foreground_bounds(const BinaryImage& img) {
  int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.get(x, y)) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

/// k-by-k pixel replication.
inline BinaryImage block_upscale(const BinaryImage& img, int k) {
  BinaryImage out(img.width() * k, img.height() * k);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out.set(x, y, img.get(x / k, y / k));
  return out;
}

}  // namespace vlpr
