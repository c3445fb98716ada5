#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "vlpr/color.hpp"
#include "vlpr/image.hpp"

namespace vlpr {

/// Red = government, Yellow = public, White = private.
enum class PlateType { Red, Yellow, White };

inline std::string to_string(PlateType t) {
  switch (t) {
    case PlateType::Red: return "Red";
    case PlateType::Yellow: return "Yellow";
    case PlateType::White: return "White";
  }
  return "?";
}

inline std::optional<PlateType> parse_plate_type(const std::string& s) {
  if (s == "Red") return PlateType::Red;
  if (s == "Yellow") return PlateType::Yellow;
  if (s == "White") return PlateType::White;
  return std::nullopt;
}

class UnknownPlateType : public std::runtime_error {
 public:
  UnknownPlateType() : std::runtime_error("no pixel matched any plate color band") {}
};

/// Saturated color band. A hue interval with hue_min > hue_max wraps through 0.
struct ChromaBand {
  double hue_min = 0.0;
  double hue_max = 0.0;
  double sat_min = 0.0;
  double val_min = 0.0;

  bool contains(const HsvPixel& p) const {
    if (p.s < sat_min || p.v < val_min) return false;
    if (hue_min <= hue_max) return p.h >= hue_min && p.h <= hue_max;
    return p.h >= hue_min || p.h <= hue_max;
  }
};

struct WhiteBand {
  double sat_max = 0.15;
  double val_min = 0.8;

  bool contains(const HsvPixel& p) const { return p.s <= sat_max && p.v >= val_min; }
};

struct PlateTypeConfig {
  ChromaBand red{0.80, 0.94, 0.45, 0.5};
  ChromaBand yellow{0.58, 0.74, 0.45, 0.5};
  WhiteBand white{0.15, 0.8};

  /// Default thresholds: the classic voting bands.
  static PlateTypeConfig classic() { return {}; }

  /// Bands placed on conventional HSV hues, for camera imagery.
  static PlateTypeConfig standard_hue() {
    PlateTypeConfig c;
    c.red = {0.95, 0.05, 0.45, 0.5};
    c.yellow = {0.12, 0.20, 0.45, 0.5};
    return c;
  }
};

struct PlateTypeHistogram {
  std::size_t red_votes = 0;
  std::size_t yellow_votes = 0;
  std::size_t white_votes = 0;
  std::size_t unmatched = 0;

  std::size_t total() const { return red_votes + yellow_votes + white_votes + unmatched; }
};

struct PlateTypeResult {
  PlateType type = PlateType::White;
  PlateTypeHistogram histogram;
};

/// Per-pixel vote. Red is tested first, then Yellow, then White, so a pixel
/// casts at most one vote even if configured bands overlap.
inline PlateTypeHistogram plate_type_votes(const RasterImage& plate, const PlateTypeConfig& cfg,
                                           std::optional<Rect> exclude = std::nullopt) {
  PlateTypeHistogram h;
  for (int y = 0; y < plate.height(); ++y) {
    for (int x = 0; x < plate.width(); ++x) {
      if (exclude && exclude->contains(x, y)) continue;
      const HsvPixel p = rgb_to_hsv(plate.at(x, y));
      if (cfg.red.contains(p)) ++h.red_votes;
      else if (cfg.yellow.contains(p)) ++h.yellow_votes;
      else if (cfg.white.contains(p)) ++h.white_votes;
      else ++h.unmatched;
    }
  }
  return h;
}

/// Most-voted background class; ties resolve Red, then Yellow, then White.
/// `exclude` skips a sub-rectangle such as the blue strip.
inline PlateTypeResult classify_plate_type(const RasterImage& plate, const PlateTypeConfig& cfg,
                                           std::optional<Rect> exclude = std::nullopt) {
  if (plate.empty()) throw std::invalid_argument("classify_plate_type: empty plate");
  PlateTypeResult r;
  r.histogram = plate_type_votes(plate, cfg, exclude);
  const auto& h = r.histogram;
  if (h.red_votes == 0 && h.yellow_votes == 0 && h.white_votes == 0) throw UnknownPlateType();
  if (h.red_votes >= h.yellow_votes && h.red_votes >= h.white_votes) r.type = PlateType::Red;
  else if (h.yellow_votes >= h.white_votes) r.type = PlateType::Yellow;
  else r.type = PlateType::White;
  return r;
}

}  // namespace vlpr
