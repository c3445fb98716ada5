#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vlpr/components.hpp"
#include "vlpr/glyph.hpp"
#include "vlpr/localization.hpp"
#include "vlpr/morphology.hpp"
#include "vlpr/threshold.hpp"

namespace vlpr {

class NoCharacters : public std::runtime_error {
 public:
  NoCharacters() : std::runtime_error("no character-sized regions on plate") {}
};

struct SegmentationConfig {
  double min_char_area = 0.01;    // fraction of plate area
  double min_char_height = 0.40;  // fraction of plate height
  int max_chars = 8;
  // Drop components touching the plate border (crop slivers, frames) and
  // components centered on the blue strip.
  bool reject_border = true;
};

/// Binarize, open, complement: glyph strokes become foreground.
inline BinaryImage prepare_plate(const RasterImage& plate) {
  return complement(opening(threshold_binarize(plate)));
}

inline BinaryImage prepare_plate(const PlateRegion& region) { return prepare_plate(region.pixels); }

/// Labels of character-sized components, left to right.
inline std::vector<int> pick_glyph_labels(const ComponentLabeling& lab, const SegmentationConfig& cfg,
                                          std::optional<Rect> strip = std::nullopt) {
  const double plate_area = static_cast<double>(lab.width) * lab.height;
  std::vector<int> keep;
  for (int label = 1; label <= lab.count; ++label) {
    const Rect& b = lab.boxes[label - 1];
    if (static_cast<double>(lab.areas[label - 1]) < cfg.min_char_area * plate_area) continue;
    if (b.height < cfg.min_char_height * lab.height) continue;
    if (cfg.reject_border) {
      if (b.x == 0 || b.y == 0 || b.right() == lab.width || b.bottom() == lab.height) continue;
      if (strip && !strip->empty()) {
        const Rect guard{strip->x - 2, strip->y, strip->width + 4, strip->height};
        if (guard.contains(b.x + b.width / 2, b.y + b.height / 2)) continue;
      }
    }
    keep.push_back(label);
  }
  if (keep.empty()) throw NoCharacters();
  if (static_cast<int>(keep.size()) > cfg.max_chars) {
    std::stable_sort(keep.begin(), keep.end(),
                     [&](int a, int b) { return lab.areas[a - 1] > lab.areas[b - 1]; });
    keep.resize(static_cast<std::size_t>(cfg.max_chars));
  }
  std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) { return lab.boxes[a - 1].x < lab.boxes[b - 1].x; });
  return keep;
}

inline std::vector<Rect> pick_glyph_regions(const ComponentLabeling& lab, const SegmentationConfig& cfg,
                                            std::optional<Rect> strip = std::nullopt) {
  std::vector<Rect> out;
  for (int label : pick_glyph_labels(lab, cfg, strip)) out.push_back(lab.boxes[label - 1]);
  return out;
}

namespace detail {

// Center-aligned nearest neighbor: output (x, y) reads source
// (floor((x + 0.5) * w / 15), floor((y + 0.5) * h / 30)) inside `fg`.
inline BinaryImage resample_glyph(const BinaryImage& src, const Rect& fg) {
  BinaryImage out(kGlyphCols, kGlyphRows);
  for (int y = 0; y < kGlyphRows; ++y) {
    const int sy = fg.y + static_cast<int>((2 * y + 1) * static_cast<long long>(fg.height) / (2 * kGlyphRows));
    for (int x = 0; x < kGlyphCols; ++x) {
      const int sx = fg.x + static_cast<int>((2 * x + 1) * static_cast<long long>(fg.width) / (2 * kGlyphCols));
      out.set(x, y, src.get(sx, sy));
    }
  }
  return out;
}

}  // namespace detail

/// Crops the minimal foreground box inside `box` and resamples it to 30x15.
/// Downsampling can skip sparse edge rows or columns; the result is then
/// resampled once more from its own bounds. That pass only upsamples, so it
/// reads every row and column and the glyph fills the canvas.
inline CharacterGlyph normalize_glyph(const BinaryImage& plate, const Rect& box) {
  if (box.empty()) throw std::invalid_argument("normalize_glyph: empty box");
  const BinaryImage region = crop(plate, box);
  const Rect fg = foreground_bounds(region);
  if (fg.empty()) throw EmptyGlyph();
  CharacterGlyph g;
  g.bits = detail::resample_glyph(region, fg);
  const Rect inner = foreground_bounds(g.bits);
  if (inner.empty()) throw EmptyGlyph();
  if (!(inner == g.bits.bounds())) g.bits = detail::resample_glyph(g.bits, inner);
  g.source_box = {box.x + fg.x, box.y + fg.y, fg.width, fg.height};
  return g;
}

inline CharacterGlyph normalize_glyph(const BinaryImage& glyph) { return normalize_glyph(glyph, glyph.bounds()); }

/// Labels the prepared plate and normalizes each picked component on its own,
/// so strokes of neighbors that intrude into a box are ignored.
inline std::vector<CharacterGlyph> extract_glyphs(const BinaryImage& prepared, const SegmentationConfig& cfg,
                                                  std::optional<Rect> strip = std::nullopt) {
  const ComponentLabeling lab = connected_components(prepared);
  std::vector<CharacterGlyph> out;
  int index = 0;
  for (int label : pick_glyph_labels(lab, cfg, strip)) {
    const Rect& b = lab.boxes[label - 1];
    CharacterGlyph g = normalize_glyph(lab.component_mask(label));
    g.index = index++;
    g.source_box = b;
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<CharacterGlyph> segment_plate(const PlateRegion& region, const SegmentationConfig& cfg) {
  return extract_glyphs(prepare_plate(region), cfg, region.strip_box);
}

}  // namespace vlpr
