#pragma once

// Directional chain-code features.
//
// Each 8-connected component of a glyph contributes its outer boundary, traced
// clockwise by Moore-neighbor following from its topmost-then-leftmost pixel and
// stopped by Jacob's criterion (re-entering the start pixel from the start
// direction). Every move is binned by the 6x5 zone of its origin pixel and by its
// Freeman direction:
//
//        3  2  1
//         \ | /
//       4 -   - 0
//         / | \ .
//        5  6  7
//
// 15 zones x 8 directions = 120 counts, zone-major.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vlpr/components.hpp"
#include "vlpr/glyph.hpp"
#include "vlpr/image.hpp"

namespace vlpr {

inline constexpr int kDirections = 8;
inline constexpr int kZoneRows = 5;
inline constexpr int kZoneCols = 3;
inline constexpr int kZoneHeight = kGlyphRows / kZoneRows;  // 6
inline constexpr int kZoneWidth = kGlyphCols / kZoneCols;   // 5
inline constexpr int kFeatureCount = kZoneRows * kZoneCols * kDirections;

static_assert(kFeatureCount == 120);

/// Offsets indexed by Freeman direction.
inline constexpr std::array<Point, 8> kDirectionOffsets{{
    {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

constexpr int direction_of(int dx, int dy) {
  for (int d = 0; d < 8; ++d)
    if (kDirectionOffsets[d].x == dx && kDirectionOffsets[d].y == dy) return d;
  return -1;
}

struct Contour {
  std::vector<std::uint8_t> moves;
  Point start;
  bool closed = false;

  /// Pixels visited, starting with `start`; the closing return is not repeated.
  std::vector<Point> pixels() const {
    std::vector<Point> out{start};
    Point p = start;
    for (std::size_t i = 0; i + 1 < moves.size(); ++i) {
      p.x += kDirectionOffsets[moves[i]].x;
      p.y += kDirectionOffsets[moves[i]].y;
      out.push_back(p);
    }
    return out;
  }
};

struct FeatureVector {
  std::array<double, kFeatureCount> counts{};

  double sum() const {
    double s = 0.0;
    for (double c : counts) s += c;
    return s;
  }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class FeatureNormalization { Off, PerGlyph };

struct FeatureOptions {
  FeatureNormalization normalize = FeatureNormalization::Off;
};

/// Minimal rectangle containing every foreground pixel of the glyph.
inline Rect bounding_box(const BinaryImage& glyph) {
  const Rect r = foreground_bounds(glyph);
  if (r.empty()) throw EmptyGlyph();
  return r;
}

inline Rect bounding_box(const CharacterGlyph& glyph) { return bounding_box(glyph.bits); }

namespace detail {

// Clockwise as displayed, starting west.
inline constexpr std::array<Point, 8> kMooreRing{{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

inline int ring_index(Point center, Point neighbor) {
  for (int i = 0; i < 8; ++i)
    if (center.x + kMooreRing[i].x == neighbor.x && center.y + kMooreRing[i].y == neighbor.y) return i;
  return -1;
}

struct Step {
  Point next;
  Point back;
  int direction = -1;  // -1: isolated pixel
};

// Scan clockwise around cur, starting just after the backtrack pixel.
inline Step moore_step(const BinaryImage& img, Point cur, Point back) {
  const int k = ring_index(cur, back);
  for (int i = 1; i <= 8; ++i) {
    const Point off = kMooreRing[(k + i) % 8];
    const Point next{cur.x + off.x, cur.y + off.y};
    if (!img.get_or_zero(next.x, next.y)) continue;
    const Point prev_off = kMooreRing[(k + i - 1) % 8];
    return {next, {cur.x + prev_off.x, cur.y + prev_off.y}, direction_of(off.x, off.y)};
  }
  return {cur, back, -1};
}

// Jacob's criterion in normalized form: the walk ends when it stands on the
// start pixel about to repeat its first move. Comparing raw backtrack pixels
// instead can miss the repeat, since several backtracks are equivalent there.
inline Contour trace_from(const BinaryImage& img, Point start) {
  Contour contour;
  contour.start = start;
  Step step = moore_step(img, start, {start.x - 1, start.y});
  if (step.direction < 0) {
    contour.closed = true;
    return contour;
  }
  const int first = step.direction;
  const std::size_t cap = 4 * img.size() + 8;
  while (contour.moves.size() < cap) {
    contour.moves.push_back(static_cast<std::uint8_t>(step.direction));
    const Point cur = step.next;
    step = moore_step(img, cur, step.back);
    if (cur == start && step.direction == first) {
      contour.closed = true;
      return contour;
    }
  }
  return contour;
}

}  // namespace detail

/// One outer contour per 8-connected component, in label order.
inline std::vector<Contour> trace_contours(const BinaryImage& img) {
  if (foreground_bounds(img).empty()) throw EmptyGlyph();
  const ComponentLabeling lab = connected_components(img);
  std::vector<Contour> out;
  out.reserve(static_cast<std::size_t>(lab.count));
  for (int label = 1; label <= lab.count; ++label) {
    const Rect& box = lab.boxes[label - 1];
    int sx = box.x;
    while (lab.at(sx, box.y) != label) ++sx;
    out.push_back(detail::trace_from(img, {sx, box.y}));
  }
  return out;
}

inline std::vector<Contour> trace_contours(const CharacterGlyph& glyph) { return trace_contours(glyph.bits); }

inline std::size_t total_moves(const std::vector<Contour>& contours) {
  std::size_t n = 0;
  for (const auto& c : contours) n += c.moves.size();
  return n;
}

inline int zone_of(int x, int y) { return (y / kZoneHeight) * kZoneCols + x / kZoneWidth; }

inline FeatureVector chain_code_features(const BinaryImage& glyph, FeatureOptions opts = {}) {
  if (glyph.width() != kGlyphCols || glyph.height() != kGlyphRows)
    throw std::invalid_argument("chain_code_features: glyph must be 15x30");
  FeatureVector fv;
  for (const Contour& c : trace_contours(glyph)) {
    Point p = c.start;
    for (std::uint8_t d : c.moves) {
      fv.counts[static_cast<std::size_t>(zone_of(p.x, p.y) * kDirections + d)] += 1.0;
      p.x += kDirectionOffsets[d].x;
      p.y += kDirectionOffsets[d].y;
    }
  }
  if (opts.normalize == FeatureNormalization::PerGlyph) {
    const double total = fv.sum();
    if (total > 0.0)
      for (double& v : fv.counts) v /= total;
  }
  return fv;
}

inline FeatureVector chain_code_features(const CharacterGlyph& glyph, FeatureOptions opts = {}) {
  return chain_code_features(glyph.bits, opts);
}

}  // namespace vlpr
