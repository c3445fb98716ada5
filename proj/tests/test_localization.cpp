#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "oracles.hpp"
#include "vlpr/localization.hpp"
#include "vlpr/synth.hpp"

using namespace vlpr;

namespace {

synth::SceneSpec spec_with(double tilt_deg, double scale) {
  synth::SceneSpec s;
  s.tilt_deg = tilt_deg;
  s.scale_min = s.scale_max = scale;
  return s;
}

bool located(const std::vector<PlateCandidate>& cands, const Rect& truth) {
  return std::any_of(cands.begin(), cands.end(), [&](const PlateCandidate& c) { return iou(c.box, truth) >= 0.5; });
}

RasterImage embed(const RasterImage& img, int w, int h, int dx, int dy) {
  RasterImage out(w, h, Rgb{128, 128, 128});
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x + dx, y + dy) = img.at(x, y);
  return out;
}

// Candidate for an upright rectangle, as extract_candidates would describe it.
PlateCandidate upright(const Rect& box, double strip_width) {
  PlateCandidate c;
  c.box = box;
  c.blue_box = {box.x, box.y, static_cast<int>(strip_width), box.height};
  c.center = {box.x + (box.width - 1) / 2.0, box.y + (box.height - 1) / 2.0};
  c.plate_width = box.width;
  c.plate_height = box.height;
  c.strip_width = strip_width;
  return c;
}

}  // namespace

TEST(BlueMask, RedImageIsEmpty) {
  EXPECT_EQ(blue_mask(RasterImage(40, 30, Rgb{220, 20, 20}), {}).count(), 0u);
}

TEST(BlueMask, InBandImageIsFull) {
  const Rgb blue = hsv_to_rgb(0.62, 0.8, 0.8);
  const HsvPixel p = rgb_to_hsv(blue);
  ASSERT_TRUE(p.h >= 0.55 && p.h <= 0.70 && p.s >= 0.40 && p.v >= 0.30);
  const RasterImage img(40, 30, blue);
  EXPECT_EQ(blue_mask(img, {}).count(), img.size());
}

TEST(BlueMask, CoversTheRenderedStrip) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double scale = 0.5 + 0.15 * static_cast<double>(seed);
    const auto scene = synth::generate_scene(seed, spec_with(0.0, scale));
    const Rect box = scene.truth[0].box;
    const int strip_w = std::max(3, static_cast<int>(std::lround(synth::PlateLayout::strip_width * scale)));
    const BinaryImage mask = blue_mask(scene.image, {});
    std::size_t hit = 0;
    for (int y = box.y; y < box.bottom(); ++y)
      for (int x = box.x; x < box.x + strip_w; ++x) hit += mask.get(x, y);
    EXPECT_GE(static_cast<double>(hit), 0.9 * strip_w * box.height) << "seed " << seed;
  }
}

TEST(Candidates, EmptyMaskGivesNone) {
  const RasterImage img(50, 40);
  EXPECT_TRUE(extract_candidates(BinaryImage(50, 40), img, {}).empty());
}

TEST(Candidates, TinyComponentIsRejected) {
  BinaryImage mask(50, 40);
  mask.set(10, 10);
  mask.set(10, 11);
  mask.set(10, 12);
  EXPECT_TRUE(extract_candidates(mask, RasterImage(50, 40), {}).empty());
}

TEST(Candidates, SizeMismatchThrows) {
  EXPECT_THROW(extract_candidates(BinaryImage(5, 5), RasterImage(6, 5), {}), std::invalid_argument);
}

TEST(Candidates, UprightStripYieldsPlateBox) {
  BinaryImage mask(400, 200);
  for (int y = 50; y < 98; ++y)
    for (int x = 30; x < 44; ++x) mask.set(x, y);
  const auto cands = extract_candidates(mask, RasterImage(400, 200), {});
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].box, (Rect{30, 50, 16 * 14, 48}));
  EXPECT_EQ(cands[0].blue_box, (Rect{30, 50, 14, 48}));
  EXPECT_EQ(cands[0].tilt, 0.0);
}

TEST(Candidates, TwoPlatesGiveTwoCandidates) {
  synth::SceneSpec spec;
  spec.plates = 2;
  spec.scale_min = spec.scale_max = 0.9;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scene = synth::generate_scene(seed, spec);
    const auto cands = extract_candidates(blue_mask(scene.image, {}), scene.image, {});
    for (const auto& t : scene.truth) EXPECT_TRUE(located(cands, t.box)) << "seed " << seed;
  }
}

TEST(Verify, UniformCropScoresZero) {
  const RasterImage img(300, 80, Rgb{240, 240, 240});
  EXPECT_EQ(verify_candidate(upright({10, 10, 224, 48}, 14), img), 0);
}

TEST(Verify, RenderedPlateMatchesScanlineOracle) {
  synth::Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    const auto text = synth::random_plate_text(rng, default_alphabet());
    const auto r = synth::render_plate(text, static_cast<PlateType>(i % 3), synth::Palette::Classic, 1.0);
    RasterImage img(r.image.width() + 20, r.image.height() + 20, Rgb{128, 128, 128});
    for (int y = 0; y < r.image.height(); ++y)
      for (int x = 0; x < r.image.width(); ++x) img.at(x + 10, y + 10) = r.image.at(x, y);
    const PlateCandidate cand = upright({10, 10, r.image.width(), r.image.height()}, r.strip.width);

    const PlateSamples s = sample_plate(img, cand);
    std::vector<int> all;
    for (int g : s.gray)
      if (g >= 0) all.push_back(g);
    int t = 0;
    double best = -1;
    for (int u = 0; u < 256; ++u) {
      const double v = oracle::between_class_variance(all, u);
      if (v > best) {
        best = v;
        t = u;
      }
    }
    std::vector<int> jumps;
    for (double f : {0.4, 0.5, 0.6}) {
      const int row = static_cast<int>(f * s.height);
      std::vector<int> line(s.gray.begin() + row * s.width, s.gray.begin() + (row + 1) * s.width);
      jumps.push_back(oracle::scanline_jumps(line, t));
    }
    std::sort(jumps.begin(), jumps.end());
    const int score = verify_candidate(cand, img);
    EXPECT_EQ(score, jumps[1]);
    EXPECT_GE(score, 12);
  }
}

TEST(Verify, StripesScoreHighAndAreAccepted) {
  RasterImage img(260, 70, Rgb{255, 255, 255});
  for (int y = 0; y < 70; ++y)
    for (int x = 0; x < 260; x += 2) img.at(x, y) = {0, 0, 0};
  PlateCandidate c = upright({10, 10, 224, 48}, 14);
  c.score = verify_candidate(c, img);
  EXPECT_GT(c.score, 200);
  EXPECT_TRUE(accept_candidate(c, {}));
}

TEST(Verify, OutsideBoxThrows) {
  EXPECT_THROW(verify_candidate(upright({100, 10, 224, 48}, 14), RasterImage(200, 100)), std::invalid_argument);
}

TEST(Verify, AcceptanceBoundaryIsSharp) {
  PlateCandidate c;
  LocalizationConfig cfg;
  c.score = cfg.min_jumps;
  EXPECT_TRUE(accept_candidate(c, cfg));
  c.score = cfg.min_jumps - 1;
  EXPECT_FALSE(accept_candidate(c, cfg));
}

TEST(Tilt, UprightStripIsLevel) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scene = synth::generate_scene(seed, spec_with(0.0, 1.0));
    const auto cands = locate_plates(scene.image, {});
    ASSERT_FALSE(cands.empty());
    EXPECT_LT(std::abs(cands[0].tilt), 0.01);
    EXPECT_LT(std::abs(estimate_tilt(cands[0], blue_mask(scene.image, {}))), 0.01);
  }
}

TEST(Tilt, KnownTiltIsRecovered) {
  for (double deg : {-10.0, -5.0, 3.0, 5.0, 8.0, 10.0}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto scene = synth::generate_scene(seed, spec_with(deg, 1.0));
      const auto cands = locate_plates(scene.image, {});
      ASSERT_FALSE(cands.empty()) << deg;
      EXPECT_NEAR(cands[0].tilt * 180.0 / std::numbers::pi, deg, 1.0);
    }
  }
}

TEST(Tilt, SingleRowIsDegenerate) {
  BinaryImage row(10, 1, true);
  EXPECT_EQ(estimate_tilt(row), 0.0);
}

TEST(Tilt, StaysWithinQuarterTurn) {
  BinaryImage diag(40, 40);
  for (int i = 0; i < 40; ++i) diag.set(i, i);
  const double t = estimate_tilt(diag);
  EXPECT_LE(std::abs(t), std::numbers::pi / 4 + 1e-12);
}

TEST(Locate, BoxesLieInsideTheImage) {
  synth::SceneSpec spec;
  spec.tilt_max_deg = 10;
  spec.scale_min = 0.5;
  spec.scale_max = 2.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto scene = synth::generate_scene(seed, spec);
    for (const auto& c : locate_plates(scene.image, {})) {
      EXPECT_TRUE(scene.image.bounds().contains(c.box));
      EXPECT_LE(std::abs(c.tilt), std::numbers::pi / 4);
    }
  }
}

TEST(Locate, ScaleRangeIsDetected) {
  for (double scale : {0.5, 0.75, 1.0, 1.5, 2.0})
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto scene = synth::generate_scene(seed, spec_with(0.0, scale));
      EXPECT_TRUE(located(locate_plates(scene.image, {}), scene.truth[0].box)) << scale << ' ' << seed;
    }
}

TEST(Locate, TranslationShiftsBoxesExactly) {
  synth::SceneSpec spec;
  spec.tilt_max_deg = 8;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto scene = synth::generate_scene(seed, spec);
    const int dx = 7 + static_cast<int>(seed), dy = 3 * static_cast<int>(seed);
    const auto a = locate_plates(embed(scene.image, 700, 520, 10, 10), {});
    const auto b = locate_plates(embed(scene.image, 700, 520, 10 + dx, 10 + dy), {});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(b[i].box, (Rect{a[i].box.x + dx, a[i].box.y + dy, a[i].box.width, a[i].box.height}));
      EXPECT_EQ(b[i].score, a[i].score);
      EXPECT_EQ(b[i].tilt, a[i].tilt);
    }
  }
}

TEST(Locate, AcceptedAreExactlyThoseAtOrAboveThreshold) {
  const auto scene = synth::generate_scene(9, synth::SceneSpec{});
  const BinaryImage mask = blue_mask(scene.image, {});
  auto cands = extract_candidates(mask, scene.image, {});
  ASSERT_FALSE(cands.empty());
  int top = 0;
  for (auto& c : cands) top = std::max(top, c.score = verify_candidate(c, scene.image));
  LocalizationConfig cfg;
  cfg.min_jumps = top;
  EXPECT_FALSE(locate_plates(scene.image, cfg).empty());
  cfg.min_jumps = top + 1;
  EXPECT_TRUE(locate_plates(scene.image, cfg).empty());
}

TEST(Locate, OrderedByScoreThenLeftmost) {
  synth::SceneSpec spec;
  spec.plates = 3;
  spec.scale_min = spec.scale_max = 0.8;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cands = locate_plates(synth::generate_scene(seed, spec).image, {});
    for (std::size_t i = 1; i < cands.size(); ++i) {
      EXPECT_GE(cands[i - 1].score, cands[i].score);
      if (cands[i - 1].score == cands[i].score) {
        EXPECT_LE(cands[i - 1].box.x, cands[i].box.x);
      }
    }
  }
}

TEST(Deskew, ZeroTiltIsPlainCrop) {
  const auto scene = synth::generate_scene(4, spec_with(0.0, 1.0));
  const PlateCandidate c = upright(scene.truth[0].box, 14);
  const PlateRegion r = deskew_and_crop(scene.image, c);
  EXPECT_EQ(r.pixels, crop(scene.image, scene.truth[0].box));
  EXPECT_FALSE(r.clipped);
  EXPECT_EQ(r.strip_box, (Rect{0, 0, 14, scene.truth[0].box.height}));
}

TEST(Deskew, EdgeCandidateIsClipped) {
  BinaryImage mask(200, 120);
  for (int y = 30; y < 78; ++y)
    for (int x = 100; x < 114; ++x) mask.set(x, y);
  RasterImage img(200, 120, Rgb{200, 200, 200});
  const auto cands = extract_candidates(mask, img, {});
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_TRUE(cands[0].clipped);
  EXPECT_EQ(cands[0].box.right(), 200);
  EXPECT_TRUE(deskew_and_crop(img, cands[0]).clipped);
}

TEST(Deskew, TiltedPlateComesOutLevelAndPlateSized) {
  for (double deg : {-8.0, 8.0}) {
    const auto scene = synth::generate_scene(2, spec_with(deg, 1.0));
    const auto cands = locate_plates(scene.image, {});
    ASSERT_FALSE(cands.empty());
    const PlateRegion r = deskew_and_crop(scene.image, cands[0]);
    const double aspect = static_cast<double>(r.pixels.width()) / r.pixels.height();
    EXPECT_GE(aspect, 3.5);
    EXPECT_LE(aspect, 6.0);
    EXPECT_NEAR(r.pixels.width(), 224, 0.05 * 224);
    EXPECT_NEAR(r.pixels.height(), 48, 3);
  }
}

TEST(Tilt, RefinementStaysInsideItsWindow) {
  synth::SceneSpec spec;
  spec.tilt_max_deg = 10;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto scene = synth::generate_scene(seed, spec);
    const BinaryImage mask = blue_mask(scene.image, {});
    LocalizationConfig off;
    off.tilt_refine_steps = 0;
    const auto coarse = extract_candidates(mask, scene.image, off);
    const auto refined = extract_candidates(mask, scene.image, {});
    ASSERT_EQ(coarse.size(), refined.size());
    const LocalizationConfig cfg;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      EXPECT_EQ(coarse[i].tilt, estimate_tilt(coarse[i], mask));
      EXPECT_LE(std::abs(refined[i].tilt - coarse[i].tilt), cfg.tilt_refine_steps * cfg.tilt_refine_step + 1e-12);
    }
  }
}
