#pragma once

// Plate localization anchored on the blue strip at the plate's left edge.
//
//   blue_mask -> extract_candidates (strip geometry) -> verify_candidate
//   (color jumps along the plate axis) -> deskew_and_crop
//
// Geometry is computed in pixel-index coordinates (pixel i has its center at i)
// relative to each strip's bounding-box origin, so shifting a scene by whole
// pixels shifts every box by exactly the same amount.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "vlpr/color.hpp"
#include "vlpr/components.hpp"
#include "vlpr/image.hpp"
#include "vlpr/morphology.hpp"
#include "vlpr/platetype.hpp"
#include "vlpr/rotate.hpp"
#include "vlpr/threshold.hpp"

namespace vlpr {

struct LocalizationConfig {
  ChromaBand blue{0.55, 0.70, 0.40, 0.30};
  int min_area = 80;
  double strip_ratio_min = 3.0;  // strip length / strip width
  double strip_ratio_max = 8.0;
  double plate_width_factor = 15.0;  // plate extends this many strip widths right of the strip
  double aspect_min = 3.5;
  double aspect_max = 6.0;
  int min_jumps = 12;
  // Tilt refinement window: steps of tilt_refine_step radians each side of the
  // strip fit. Zero steps keeps the strip fit as is.
  int tilt_refine_steps = 12;
  double tilt_refine_step = 0.0035;
};

struct PlateCandidate {
  Rect box;       // axis-aligned bounds of the (possibly tilted) plate, clamped to the image
  Rect blue_box;  // bounds of the anchoring strip component
  double tilt = 0.0;
  int score = 0;
  bool clipped = false;  // plate bounds extended past the image

  // Plate rectangle in its own frame, in scene pixel-index coordinates.
  PointF center;
  double plate_width = 0.0;
  double plate_height = 0.0;
  double strip_width = 0.0;
};

struct PlateRegion {
  RasterImage pixels;
  Rect scene_box;      // candidate box this region came from
  double tilt_applied = 0.0;
  Rect strip_box;      // blue strip within `pixels`
  bool clipped = false;
};

/// Pixels inside the configured blue band, then one 3x3 opening.
inline BinaryImage blue_mask(const RasterImage& img, const LocalizationConfig& cfg) {
  BinaryImage raw(img.width(), img.height());
  auto& bits = raw.bits();
  const auto& px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) bits[i] = cfg.blue.contains(rgb_to_hsv(px[i])) ? 1 : 0;
  return opening(raw);
}

namespace detail {

struct StripPixels {
  std::vector<Point> pts;  // relative to origin
  Point origin;
};

inline StripPixels strip_pixels(const ComponentLabeling& lab, int label) {
  StripPixels s;
  const Rect& b = lab.boxes[label - 1];
  s.origin = {b.x, b.y};
  for (int y = 0; y < b.height; ++y)
    for (int x = 0; x < b.width; ++x)
      if (lab.at(b.x + x, b.y + y) == label) s.pts.push_back({x, y});
  return s;
}

// Least-squares fit x = a + b*y through per-row centroids; tilt = atan(b).
inline double fit_tilt(const std::vector<Point>& pts) {
  if (pts.empty()) return 0.0;
  int y0 = pts.front().y, y1 = pts.front().y;
  for (const Point& p : pts) {
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const int rows = y1 - y0 + 1;
  if (rows < 2) return 0.0;
  std::vector<double> sum(static_cast<std::size_t>(rows), 0.0);
  std::vector<int> cnt(static_cast<std::size_t>(rows), 0);
  for (const Point& p : pts) {
    sum[static_cast<std::size_t>(p.y - y0)] += p.x;
    ++cnt[static_cast<std::size_t>(p.y - y0)];
  }
  // Rows crossing the slanted end caps are short and their centroids lean
  // toward the middle; fit only rows at least 90% as long as the median row.
  std::vector<int> sorted;
  for (int c : cnt)
    if (c) sorted.push_back(c);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double min_run = 0.9 * sorted[sorted.size() / 2];
  double n = 0, sy = 0, sx = 0, syy = 0, sxy = 0;
  for (int r = 0; r < rows; ++r) {
    if (!cnt[static_cast<std::size_t>(r)] || cnt[static_cast<std::size_t>(r)] < min_run) continue;
    const double y = r, x = sum[static_cast<std::size_t>(r)] / cnt[static_cast<std::size_t>(r)];
    n += 1;
    sy += y;
    sx += x;
    syy += y * y;
    sxy += x * y;
  }
  const double den = n * syy - sy * sy;
  if (n < 2 || den <= 0.0) return 0.0;
  const double slope = (n * sxy - sx * sy) / den;
  return std::clamp(std::atan(slope), -std::numbers::pi / 4, std::numbers::pi / 4);
}

struct PlateFrame {
  double cos_t = 1.0;
  double sin_t = 0.0;
  PointF center;  // plate center in scene coordinates

  // Offset (u, v) in the de-rotated plate frame to scene coordinates.
  PointF to_scene(double u, double v) const {
    return {center.x + cos_t * u + sin_t * v, center.y - sin_t * u + cos_t * v};
  }
};

inline Rect bounds_of(const PlateCandidate& c, const PlateFrame& f) {
  const double hw = c.plate_width / 2, hh = c.plate_height / 2;
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& [u, v] : {std::pair{-hw, -hh}, {hw, -hh}, {-hw, hh}, {hw, hh}}) {
    const PointF p = f.to_scene(u, v);
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const int ix0 = static_cast<int>(std::floor(x0 + 0.5)), iy0 = static_cast<int>(std::floor(y0 + 0.5));
  const int ix1 = static_cast<int>(std::floor(x1 + 0.5)), iy1 = static_cast<int>(std::floor(y1 + 0.5));
  return {ix0, iy0, ix1 - ix0, iy1 - iy0};
}

inline PlateFrame frame_of(const PlateCandidate& c) {
  return {std::cos(c.tilt), std::sin(c.tilt), c.center};
}

}  // namespace detail

/// Tilt of a strip mask: angle of its axis against the vertical. Positive when
/// the strip leans the way rotate() turns content for a positive angle.
inline double estimate_tilt(const BinaryImage& strip) {
  std::vector<Point> pts;
  for (int y = 0; y < strip.height(); ++y)
    for (int x = 0; x < strip.width(); ++x)
      if (strip.get(x, y)) pts.push_back({x, y});
  return detail::fit_tilt(pts);
}

/// Tilt of the largest blue component inside the candidate's strip box.
inline double estimate_tilt(const PlateCandidate& cand, const BinaryImage& mask) {
  const BinaryImage sub = crop(mask, cand.blue_box);
  const ComponentLabeling lab = connected_components(sub);
  if (lab.count == 0) return 0.0;
  const auto it = std::max_element(lab.areas.begin(), lab.areas.end());
  return estimate_tilt(lab.component_mask(static_cast<int>(it - lab.areas.begin()) + 1));
}

namespace detail {

// Plate geometry implied by a strip at a given tilt, in coordinates relative to
// the strip's bounding-box origin. Empty when the strip or plate shape is off.
inline std::optional<PlateCandidate> strip_geometry(const StripPixels& strip, double tilt,
                                                    const LocalizationConfig& cfg) {
  const double c = std::cos(tilt), s = std::sin(tilt);
  double mx = 0, my = 0;
  for (const Point& p : strip.pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(strip.pts.size());
  my /= static_cast<double>(strip.pts.size());

  // De-rotate offsets from the centroid into the strip frame.
  double u0 = 1e300, u1 = -1e300, v0 = 1e300, v1 = -1e300;
  for (const Point& p : strip.pts) {
    const double dx = p.x - mx, dy = p.y - my;
    const double u = c * dx - s * dy, v = s * dx + c * dy;
    u0 = std::min(u0, u);
    u1 = std::max(u1, u);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
  }
  const double length = v1 - v0 + 1.0;
  const double width = static_cast<double>(strip.pts.size()) / length;
  const double ratio = length / width;
  if (ratio < cfg.strip_ratio_min || ratio > cfg.strip_ratio_max) return std::nullopt;
  const double plate_w = (1.0 + cfg.plate_width_factor) * width;
  const double aspect = plate_w / length;
  if (aspect < cfg.aspect_min || aspect > cfg.aspect_max) return std::nullopt;

  // Plate center in the strip frame: the strip's left edge is the plate's.
  const double strip_mid_u = (u0 + u1) / 2.0;
  const double plate_cu = strip_mid_u - width / 2.0 + plate_w / 2.0;
  const double plate_cv = (v0 + v1) / 2.0;

  PlateCandidate cand;
  cand.tilt = tilt;
  cand.plate_width = plate_w;
  cand.plate_height = length;
  cand.strip_width = width;
  cand.center = {mx + c * plate_cu + s * plate_cv, my - s * plate_cu + c * plate_cv};
  return cand;
}

// Gradient energy of the row profile of mean gray right of the strip. Glyph
// tops and bottoms and the plate's long edges line up with the sampling rows
// only at the right angle. Samples are taken relative to the strip origin and
// shifted by whole pixels.
inline double profile_sharpness(const PlateCandidate& rel, Point origin, const RasterImage& img) {
  const PlateFrame f{std::cos(rel.tilt), std::sin(rel.tilt), rel.center};
  const int w = static_cast<int>(std::floor(rel.plate_width)), h = static_cast<int>(std::floor(rel.plate_height));
  const int i0 = static_cast<int>(std::ceil(rel.strip_width)) + 2;
  if (h < 3 || i0 >= w) return 0.0;
  std::vector<double> mean(static_cast<std::size_t>(h), 0.0);
  for (int j = 0; j < h; ++j) {
    const double v = -rel.plate_height / 2.0 + 0.5 + j;
    long sum = 0, n = 0;
    for (int i = i0; i < w; ++i) {
      const PointF p = f.to_scene(-rel.plate_width / 2.0 + 0.5 + i, v);
      const int x = static_cast<int>(std::floor(p.x + 0.5)) + origin.x;
      const int y = static_cast<int>(std::floor(p.y + 0.5)) + origin.y;
      if (!img.bounds().contains(x, y)) continue;
      sum += luma(img.at(x, y));
      ++n;
    }
    mean[static_cast<std::size_t>(j)] = n ? static_cast<double>(sum) / n : 0.0;
  }
  double score = 0.0;
  for (std::size_t j = 1; j < mean.size(); ++j) {
    const double d = mean[j] - mean[j - 1];
    score += d * d;
  }
  return score;
}

}  // namespace detail

/// One candidate per blue component with strip-like geometry. The plate box is
/// built in the strip's own frame and reported as its axis-aligned bounds.
///
/// A strip only a few dozen rows tall cannot resolve tilt much below a degree,
/// which is enough to push glyphs at the far end of the plate off the crop. The
/// strip fit is therefore refined over a small angle window by the row profile
/// of the plate body.
inline std::vector<PlateCandidate> extract_candidates(const BinaryImage& mask, const RasterImage& img,
                                                      const LocalizationConfig& cfg) {
  if (mask.width() != img.width() || mask.height() != img.height())
    throw std::invalid_argument("extract_candidates: mask and image sizes differ");
  std::vector<PlateCandidate> out;
  const ComponentLabeling lab = connected_components(mask);
  for (int label = 1; label <= lab.count; ++label) {
    if (lab.areas[label - 1] < static_cast<std::size_t>(cfg.min_area)) continue;
    const detail::StripPixels strip = detail::strip_pixels(lab, label);
    const double coarse = detail::fit_tilt(strip.pts);
    std::optional<PlateCandidate> best = detail::strip_geometry(strip, coarse, cfg);
    if (!best) continue;
    if (cfg.tilt_refine_steps > 0) {
      double best_score = detail::profile_sharpness(*best, strip.origin, img);
      for (int k = 1; k <= cfg.tilt_refine_steps; ++k)
        for (int sign : {-1, 1}) {
          const double tilt = coarse + sign * k * cfg.tilt_refine_step;
          if (std::abs(tilt) > std::numbers::pi / 4) continue;
          const auto g = detail::strip_geometry(strip, tilt, cfg);
          if (!g) continue;
          const double score = detail::profile_sharpness(*g, strip.origin, img);
          if (score > best_score) {
            best_score = score;
            best = g;
          }
        }
    }

    PlateCandidate cand = *best;
    cand.blue_box = lab.boxes[label - 1];
    const Rect rel = detail::bounds_of(cand, detail::frame_of(cand));
    cand.center = {cand.center.x + strip.origin.x, cand.center.y + strip.origin.y};
    const Rect full{rel.x + strip.origin.x, rel.y + strip.origin.y, rel.width, rel.height};
    cand.box = intersect(full, img.bounds());
    cand.clipped = !(cand.box == full);
    if (cand.box.empty()) continue;
    out.push_back(cand);
  }
  return out;
}

/// Gray samples of the plate rectangle in its own frame, one per plate pixel,
/// row-major; -1 where the sample falls outside the candidate box.
struct PlateSamples {
  int width = 0;
  int height = 0;
  std::vector<int> gray;

  int at(int x, int y) const { return gray[static_cast<std::size_t>(y) * width + x]; }
};

inline PlateSamples sample_plate(const RasterImage& img, const PlateCandidate& cand) {
  const detail::PlateFrame f = detail::frame_of(cand);
  PlateSamples s;
  s.width = std::max(1, static_cast<int>(std::floor(cand.plate_width)));
  s.height = std::max(1, static_cast<int>(std::floor(cand.plate_height)));
  s.gray.assign(static_cast<std::size_t>(s.width) * s.height, -1);
  for (int j = 0; j < s.height; ++j) {
    const double v = -cand.plate_height / 2.0 + 0.5 + j;
    for (int i = 0; i < s.width; ++i) {
      const PointF p = f.to_scene(-cand.plate_width / 2.0 + 0.5 + i, v);
      const int x = static_cast<int>(std::floor(p.x + 0.5)), y = static_cast<int>(std::floor(p.y + 0.5));
      if (cand.box.contains(x, y)) s.gray[static_cast<std::size_t>(j) * s.width + i] = luma(img.at(x, y));
    }
  }
  return s;
}

/// Transitions across `threshold` along the sample row `fraction` of the way down.
inline int count_jumps(const PlateSamples& s, double fraction, int threshold) {
  const int row = std::clamp(static_cast<int>(fraction * s.height), 0, s.height - 1);
  int jumps = 0;
  int prev = -1;
  for (int x = 0; x < s.width; ++x) {
    const int g = s.at(x, row);
    if (g < 0) continue;
    const int on = g > threshold ? 1 : 0;
    if (prev >= 0 && on != prev) ++jumps;
    prev = on;
  }
  return jumps;
}

/// Median color-jump count over scanlines at 40%, 50% and 60% of plate height.
/// Scanlines follow the plate's tilt; the gray threshold maximizes inter-class
/// variance over the plate rectangle itself.
inline int verify_candidate(const PlateCandidate& cand, const RasterImage& img) {
  if (cand.box.empty() || !img.bounds().contains(cand.box))
    throw std::invalid_argument("verify_candidate: candidate box outside image");
  const PlateSamples s = sample_plate(img, cand);
  Histogram256 hist{};
  int lo = 255, hi = 0;
  for (int g : s.gray)
    if (g >= 0) {
      ++hist[static_cast<std::size_t>(g)];
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  if (lo >= hi) return 0;
  const int t = otsu_threshold(hist);
  std::array<int, 3> j{count_jumps(s, 0.4, t), count_jumps(s, 0.5, t), count_jumps(s, 0.6, t)};
  std::sort(j.begin(), j.end());
  return j[1];
}

inline bool accept_candidate(const PlateCandidate& cand, const LocalizationConfig& cfg) {
  return cand.score >= cfg.min_jumps;
}

/// Candidates that pass verification, best score first, ties by leftmost box.
inline std::vector<PlateCandidate> locate_plates(const RasterImage& img, const LocalizationConfig& cfg) {
  const BinaryImage mask = blue_mask(img, cfg);
  std::vector<PlateCandidate> cands = extract_candidates(mask, img, cfg);
  std::vector<PlateCandidate> out;
  for (PlateCandidate& c : cands) {
    c.score = verify_candidate(c, img);
    if (accept_candidate(c, cfg)) out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const PlateCandidate& a, const PlateCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.box.x != b.box.x) return a.box.x < b.box.x;
    return a.box.y < b.box.y;
  });
  return out;
}

/// Rotates a neighborhood of the candidate by -tilt and crops the upright plate.
inline PlateRegion deskew_and_crop(const RasterImage& img, const PlateCandidate& cand) {
  const int margin = 2;
  const Rect hood = intersect(
      Rect{cand.box.x - margin, cand.box.y - margin, cand.box.width + 2 * margin, cand.box.height + 2 * margin},
      img.bounds());
  const RasterImage local = crop(img, hood);
  const RasterImage upright = rotate(local, -cand.tilt);
  const PointF c = rotate_point({cand.center.x - hood.x, cand.center.y - hood.y}, -cand.tilt, hood.width, hood.height);

  const double left = c.x - cand.plate_width / 2.0, top = c.y - cand.plate_height / 2.0;
  const int x0 = static_cast<int>(std::floor(left + 0.5));
  const int y0 = static_cast<int>(std::floor(top + 0.5));
  const int x1 = static_cast<int>(std::floor(left + cand.plate_width + 0.5));
  const int y1 = static_cast<int>(std::floor(top + cand.plate_height + 0.5));
  const Rect want{x0, y0, x1 - x0, y1 - y0};
  const Rect got = intersect(want, upright.bounds());
  if (got.empty()) throw std::runtime_error("deskew_and_crop: plate falls outside its neighborhood");

  PlateRegion r;
  r.pixels = crop(upright, got);
  r.scene_box = cand.box;
  r.tilt_applied = -cand.tilt;
  r.clipped = cand.clipped || !(got == want);
  const int strip_w = static_cast<int>(std::lround(cand.strip_width));
  r.strip_box = intersect(Rect{want.x - got.x, 0, strip_w, r.pixels.height()}, r.pixels.bounds());
  return r;
}

}  // namespace vlpr
