#pragma once

// Seeded synthetic data: jittered character glyphs and 640x480 street scenes
// with blue-strip plates. Everything here is a ground-truth oracle for tests and
// evaluation; all randomness flows from a caller-provided seed through
// std::mt19937_64 with library-independent draws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlpr/classifier.hpp"
#include "vlpr/color.hpp"
#include "vlpr/components.hpp"
#include "vlpr/font.hpp"
#include "vlpr/glyph.hpp"
#include "vlpr/image.hpp"
#include "vlpr/morphology.hpp"
#include "vlpr/platetype.hpp"
#include "vlpr/rotate.hpp"
#include "vlpr/segmentation.hpp"

namespace vlpr::synth {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(vlpr::detail::bounded(engine_, static_cast<std::uint64_t>(hi - lo) + 1));
  }
  bool chance(double p) { return unit() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

inline BinaryImage pad(const BinaryImage& img, int border) {
  BinaryImage out(img.width() + 2 * border, img.height() + 2 * border);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(x + border, y + border, img.get(x, y));
  return out;
}

inline BinaryImage largest_component(const BinaryImage& img) {
  const ComponentLabeling lab = connected_components(img);
  if (lab.count == 0) throw EmptyGlyph();
  const auto it = std::max_element(lab.areas.begin(), lab.areas.end());
  return lab.component_mask(static_cast<int>(it - lab.areas.begin()) + 1);
}

// ---------------------------------------------------------------------------
// Glyph corpus

struct GlyphJitter {
  int min_height = 28;
  int max_height = 56;
  double aspect_min = 0.42;  // width / height
  double aspect_max = 0.56;
  double thickness_min = 0.09;  // fraction of height
  double thickness_max = 0.13;
  double rotation_deg = 2.0;
  double shear = 0.05;
  double warp = 0.04;           // peak bulge in unit-box coordinates
  double roundtrip_deg = 10.0;  // tilt-then-deskew resampling, as a tilted plate sees it
  double roundtrip_prob = 0.5;
};

// Smooth bulge warp; keeps joined strokes joined.
inline font::StrokeGlyph warp_strokes(const font::StrokeGlyph& g, Rng& rng, double amount) {
  const double bx = rng.uniform(-amount, amount), by = rng.uniform(-amount, amount);
  font::StrokeGlyph out = g;
  for (auto& line : out)
    for (auto& p : line) {
      const PointF q = p;
      p.x = q.x + bx * std::sin(std::numbers::pi * q.y);
      p.y = q.y + by * std::sin(std::numbers::pi * q.x);
    }
  return out;
}

/// One glyph as the pipeline would see it: rendered at a random size, resampled
/// through rotations, cleaned by the plate's closing, largest component only.
inline BinaryImage render_jittered(const std::string& label, Rng& rng, const GlyphJitter& j = {}) {
  const int h = rng.integer(j.min_height, j.max_height);
  const int w = std::max(3, static_cast<int>(std::lround(h * rng.uniform(j.aspect_min, j.aspect_max))));
  const double thick = std::max(2.0, h * rng.uniform(j.thickness_min, j.thickness_max));
  BinaryImage canvas(w + 4, h + 4);
  font::draw(canvas, warp_strokes(font::glyph(label), rng, j.warp),
             {2.0, 2.0, static_cast<double>(w), static_cast<double>(h), thick, rng.uniform(-j.shear, j.shear)});
  const double small = deg(rng.uniform(-j.rotation_deg, j.rotation_deg));
  BinaryImage img;
  if (rng.chance(j.roundtrip_prob)) {
    const double tilt = deg(rng.uniform(-j.roundtrip_deg, j.roundtrip_deg));
    img = rotate(rotate(canvas, tilt), -tilt + small);
  } else {
    img = rotate(canvas, small);
  }
  return largest_component(closing(pad(img, 2)));
}

inline CharacterGlyph glyph_sample(const std::string& label, Rng& rng, const GlyphJitter& j = {}) {
  return normalize_glyph(render_jittered(label, rng, j));
}

struct GlyphSample {
  std::string label;
  CharacterGlyph glyph;
};

/// per_class samples of every alphabet label, class-major.
inline std::vector<GlyphSample> glyph_corpus(const std::vector<std::string>& alphabet, int per_class,
                                             std::uint64_t seed, const GlyphJitter& j = {}) {
  Rng rng(seed);
  std::vector<GlyphSample> out;
  out.reserve(alphabet.size() * static_cast<std::size_t>(per_class));
  for (const auto& label : alphabet)
    for (int i = 0; i < per_class; ++i) out.push_back({label, glyph_sample(label, rng, j)});
  return out;
}

inline std::vector<LabeledSample> to_samples(const std::vector<GlyphSample>& corpus, FeatureOptions opts = {}) {
  std::vector<LabeledSample> out;
  out.reserve(corpus.size());
  for (const auto& g : corpus) out.push_back({chain_code_features(g.glyph, opts), g.label});
  return out;
}

/// Trains on a fresh jittered corpus; convenient for tests and demos.
inline KnnModel train_synthetic_model(std::uint64_t seed, int per_class = 40,
                                      std::vector<std::string> alphabet = default_alphabet(), int k = 1) {
  const auto corpus = glyph_corpus(alphabet, per_class, seed);
  return train_model(to_samples(corpus), std::move(alphabet), k);
}

// ---------------------------------------------------------------------------
// Plates and scenes

enum class Palette { Classic, Standard };

inline Rgb plate_background(PlateType t, Palette p) {
  if (t == PlateType::White) return hsv_to_rgb(0.0, 0.03, 0.95);
  if (p == Palette::Classic) {
    // Hues inside the classic voting bands.
    return t == PlateType::Red ? hsv_to_rgb(0.87, 0.6, 0.9) : hsv_to_rgb(0.725, 0.6, 0.9);
  }
  return t == PlateType::Red ? hsv_to_rgb(0.0, 0.75, 0.85) : hsv_to_rgb(0.15, 0.75, 0.95);
}

inline Rgb strip_color() { return hsv_to_rgb(0.62, 0.85, 0.7); }
inline constexpr Rgb kInk{25, 25, 25};

/// Nominal plate geometry at scale 1, in pixels.
struct PlateLayout {
  static constexpr double strip_width = 14.0;
  static constexpr double height = 48.0;
  static constexpr double strip_multiple = 16.0;  // plate width / strip width
  static constexpr double glyph_height = 32.0;
  static constexpr double glyph_width = 15.0;
  static constexpr double glyph_pitch = 24.0;
  static constexpr double first_glyph_gap = 10.0;  // after the strip
};

struct PlateRender {
  RasterImage image;
  BinaryImage ink;  // glyph strokes
  Rect strip;
  std::vector<Rect> glyph_boxes;
};

inline PlateRender render_plate(const std::vector<std::string>& text, PlateType type, Palette palette, double scale,
                                double thickness_frac = 0.105) {
  const int strip_w = std::max(3, static_cast<int>(std::lround(PlateLayout::strip_width * scale)));
  const int h = std::max(8, static_cast<int>(std::lround(PlateLayout::height * scale)));
  const int w = static_cast<int>(PlateLayout::strip_multiple) * strip_w;
  PlateRender r{RasterImage(w, h, plate_background(type, palette)), BinaryImage(w, h), {0, 0, strip_w, h}, {}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < strip_w; ++x) r.image.at(x, y) = strip_color();
  const double gh = PlateLayout::glyph_height * scale, gw = PlateLayout::glyph_width * scale;
  const double y0 = (h - gh) / 2.0;
  const double thick = std::max(2.0, gh * thickness_frac);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const double x0 = strip_w + PlateLayout::first_glyph_gap * scale + static_cast<double>(i) * PlateLayout::glyph_pitch * scale;
    font::draw(r.ink, font::glyph(text[i]), {x0, y0, gw, gh, thick, 0.0});
    r.glyph_boxes.push_back({static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)),
                             static_cast<int>(std::ceil(gw)), static_cast<int>(std::ceil(gh))});
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (r.ink.get(x, y)) r.image.at(x, y) = kInk;
  return r;
}

/// Iranian-style layout: 2 digits, letter, 3 digits, 2 digits.
inline std::vector<std::string> random_plate_text(Rng& rng, const std::vector<std::string>& alphabet) {
  std::vector<std::string> digits, letters;
  for (const auto& l : alphabet) {
    if (!font::has_glyph(l)) continue;
    (l.size() == 1 && l[0] >= '0' && l[0] <= '9' ? digits : letters).push_back(l);
  }
  if (digits.empty()) digits = letters;
  if (letters.empty()) letters = digits;
  if (digits.empty()) throw std::invalid_argument("alphabet has no renderable labels");
  auto pick = [&](const std::vector<std::string>& v) { return v[static_cast<std::size_t>(rng.integer(0, static_cast<int>(v.size()) - 1))]; };
  std::vector<std::string> t;
  for (int i = 0; i < 2; ++i) t.push_back(pick(digits));
  t.push_back(pick(letters));
  for (int i = 0; i < 5; ++i) t.push_back(pick(digits));
  return t;
}

inline std::string join_text(const std::vector<std::string>& t) {
  std::string s;
  for (const auto& x : t) s += x;
  return s;
}

struct PlateTruth {
  Rect box;  // axis-aligned bounds of the rendered plate in the scene
  std::string text;
  std::vector<std::string> glyphs;
  double tilt = 0.0;  // radians, rotate() convention
  PlateType type = PlateType::White;
  double scale = 1.0;
};

struct SyntheticScene {
  RasterImage image;
  std::vector<PlateTruth> truth;
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  int plates = 1;
  double tilt_max_deg = 0.0;
  std::optional<double> tilt_deg;  // fixed tilt overrides the range
  double scale_min = 1.0;
  double scale_max = 1.0;
  std::optional<PlateType> type;  // random when unset
  Palette palette = Palette::Classic;
  double speckle = 0.0;  // fraction of pixels replaced by black/white salt and pepper
  int noise = 4;         // per-channel uniform noise amplitude
  bool distractors = true;
  std::vector<std::string> alphabet = default_alphabet();
  std::optional<std::vector<std::string>> text;  // fixed text for every plate

  void validate() const {
    if (width < 64 || height < 64) throw std::invalid_argument("scene must be at least 64x64");
    if (plates < 0 || plates > 4) throw std::invalid_argument("plates must be within 0..4");
    if (tilt_max_deg < 0 || tilt_max_deg > 30) throw std::invalid_argument("tilt range must be within 0..30 degrees");
    if (tilt_deg && std::abs(*tilt_deg) > 30) throw std::invalid_argument("tilt must be within +-30 degrees");
    if (!(scale_min > 0.2) || scale_max < scale_min || scale_max > 3.0) throw std::invalid_argument("bad scale range");
    if (speckle < 0 || speckle > 0.2) throw std::invalid_argument("speckle must be within 0..0.2");
    if (noise < 0 || noise > 32) throw std::invalid_argument("noise must be within 0..32");
  }
};

namespace detail {

// Scene colors stay clear of the blue band.
inline Rgb clutter_color(Rng& rng) {
  double h = rng.uniform(0.0, 0.67);
  if (h > 0.45) h += 0.33;  // skip 0.45..0.78
  return hsv_to_rgb(h, rng.uniform(0.0, 0.5), rng.uniform(0.2, 0.9));
}

inline void fill(RasterImage& img, const Rect& r, Rgb c) {
  const Rect b = intersect(r, img.bounds());
  for (int y = b.y; y < b.bottom(); ++y)
    for (int x = b.x; x < b.right(); ++x) img.at(x, y) = c;
}

inline Rect grow(const Rect& r, int m) { return {r.x - m, r.y - m, r.width + 2 * m, r.height + 2 * m}; }

inline bool overlaps_any(const Rect& r, const std::vector<Rect>& others, int margin) {
  for (const Rect& o : others)
    if (!intersect(grow(o, margin), r).empty()) return true;
  return false;
}

}  // namespace detail

/// Axis-aligned bounds of a w x h plate rotated by theta and pasted so that its
/// rotated canvas starts at (ox, oy).
inline Rect rotated_plate_bounds(int w, int h, double theta, int ox, int oy) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const PointF corner : {PointF{-0.5, -0.5}, PointF{w - 0.5, -0.5}, PointF{-0.5, h - 0.5}, PointF{w - 0.5, h - 0.5}}) {
    const PointF p = rotate_point(corner, theta, w, h);
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const int ix0 = static_cast<int>(std::floor(x0 + 0.5)), iy0 = static_cast<int>(std::floor(y0 + 0.5));
  const int ix1 = static_cast<int>(std::floor(x1 + 0.5)), iy1 = static_cast<int>(std::floor(y1 + 0.5));
  return {ix0 + ox, iy0 + oy, ix1 - ix0, iy1 - iy0};
}

inline SyntheticScene generate_scene(std::uint64_t seed, const SceneSpec& spec) {
  spec.validate();
  Rng rng(seed);
  SyntheticScene scene;
  RasterImage& img = scene.image = RasterImage(spec.width, spec.height);

  // Background: vertical gradient plus clutter rectangles.
  const Rgb top = detail::clutter_color(rng), bottom = detail::clutter_color(rng);
  for (int y = 0; y < spec.height; ++y) {
    const double t = static_cast<double>(y) / (spec.height - 1);
    const Rgb c{static_cast<std::uint8_t>(std::lround(top.r + t * (bottom.r - top.r))),
                static_cast<std::uint8_t>(std::lround(top.g + t * (bottom.g - top.g))),
                static_cast<std::uint8_t>(std::lround(top.b + t * (bottom.b - top.b)))};
    for (int x = 0; x < spec.width; ++x) img.at(x, y) = c;
  }
  const int clutter = rng.integer(6, 12);
  for (int i = 0; i < clutter; ++i) {
    const int w = rng.integer(20, spec.width / 3), h = rng.integer(20, spec.height / 3);
    detail::fill(img, {rng.integer(0, spec.width - 1), rng.integer(0, spec.height - 1), w, h}, detail::clutter_color(rng));
  }

  // Plate geometry and placement first, so car bodies and distractors can avoid them.
  struct Planned {
    PlateRender render;
    RasterImage rotated;
    BinaryImage coverage;
    int ox = 0, oy = 0;
    PlateTruth truth;
  };
  std::vector<Planned> planned;
  std::vector<Rect> taken;
  for (int p = 0; p < spec.plates; ++p) {
    Planned pl;
    const double scale = rng.uniform(spec.scale_min, spec.scale_max);
    const double tilt = deg(spec.tilt_deg ? *spec.tilt_deg : rng.uniform(-spec.tilt_max_deg, spec.tilt_max_deg));
    const PlateType type = spec.type ? *spec.type : static_cast<PlateType>(rng.integer(0, 2));
    const std::vector<std::string> text = spec.text ? *spec.text : random_plate_text(rng, spec.alphabet);
    pl.render = render_plate(text, type, spec.palette, scale, rng.uniform(0.095, 0.115));
    pl.rotated = rotate(pl.render.image, tilt);
    pl.coverage = rotate(BinaryImage(pl.render.image.width(), pl.render.image.height(), true), tilt);
    const int rw = pl.rotated.width(), rh = pl.rotated.height();
    if (rw + 16 > spec.width || rh + 16 > spec.height) throw std::invalid_argument("plate does not fit in the scene");
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      pl.ox = rng.integer(8, spec.width - rw - 8);
      pl.oy = rng.integer(8, spec.height - rh - 8);
      const Rect r = rotated_plate_bounds(pl.render.image.width(), pl.render.image.height(), tilt, pl.ox, pl.oy);
      if (!detail::overlaps_any(r, taken, 24)) placed = true;
    }
    if (!placed) throw std::runtime_error("could not place plate without overlap");
    pl.truth.box = rotated_plate_bounds(pl.render.image.width(), pl.render.image.height(), tilt, pl.ox, pl.oy);
    pl.truth.text = join_text(text);
    pl.truth.glyphs = text;
    pl.truth.tilt = tilt;
    pl.truth.type = type;
    pl.truth.scale = scale;
    taken.push_back(pl.truth.box);
    planned.push_back(std::move(pl));
  }

  // Car bodies behind the plates.
  for (const auto& pl : planned) {
    const Rect b = pl.truth.box;
    const Rect body{b.x - b.width / 2, b.y - b.height * 2, b.width * 2, b.height * 4};
    detail::fill(img, body, detail::clutter_color(rng));
  }

  // Blue shapes that fail the strip geometry: squares, bars, poles.
  if (spec.distractors) {
    const int n = rng.integer(0, 3);
    for (int i = 0; i < n; ++i) {
      int w = 0, h = 0;
      switch (rng.integer(0, 2)) {
        case 0: w = h = rng.integer(10, 30); break;
        case 1: w = rng.integer(40, 80); h = rng.integer(8, 12); break;
        default: w = rng.integer(4, 6); h = rng.integer(80, 140); break;
      }
      for (int attempt = 0; attempt < 50; ++attempt) {
        const Rect r{rng.integer(0, std::max(0, spec.width - w)), rng.integer(0, std::max(0, spec.height - h)), w, h};
        if (detail::overlaps_any(r, taken, 16)) continue;
        detail::fill(img, r, hsv_to_rgb(rng.uniform(0.58, 0.66), rng.uniform(0.6, 0.9), rng.uniform(0.5, 0.8)));
        taken.push_back(r);
        break;
      }
    }
  }

  for (const auto& pl : planned) {
    for (int y = 0; y < pl.rotated.height(); ++y)
      for (int x = 0; x < pl.rotated.width(); ++x)
        if (pl.coverage.get(x, y)) img.at(pl.ox + x, pl.oy + y) = pl.rotated.at(x, y);
    scene.truth.push_back(pl.truth);
  }

  if (spec.noise > 0) {
    for (Rgb& p : img.pixels()) {
      auto jitter = [&](std::uint8_t c) {
        return static_cast<std::uint8_t>(std::clamp(c + rng.integer(-spec.noise, spec.noise), 0, 255));
      };
      p = {jitter(p.r), jitter(p.g), jitter(p.b)};
    }
  }
  if (spec.speckle > 0) {
    for (Rgb& p : img.pixels())
      if (rng.chance(spec.speckle)) p = rng.chance(0.5) ? Rgb{235, 235, 235} : Rgb{20, 20, 20};
  }
  return scene;
}

}  // namespace vlpr::synth
