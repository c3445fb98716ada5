#pragma once

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vlpr/classifier.hpp"
#include "vlpr/features.hpp"
#include "vlpr/localization.hpp"
#include "vlpr/platetype.hpp"
#include "vlpr/segmentation.hpp"
#include "vlpr/synth.hpp"

namespace vlpr {

struct PipelineConfig {
  LocalizationConfig localization;
  SegmentationConfig segmentation;
  FeatureOptions features;
  PlateTypeConfig plate_type;
};

struct GlyphReading {
  std::string label;
  double confidence = 0.0;
};

struct PlateReading {
  std::string text;
  PlateType plate_type = PlateType::White;
  PlateTypeHistogram type_votes;
  PlateRegion region;
  PlateCandidate candidate;
  std::vector<GlyphReading> per_glyph;
  double elapsed_ms = 0.0;  // wall time of the whole per-image pipeline
};

struct Diagnostic {
  Rect box;
  std::string message;
};

struct ReadResult {
  std::vector<PlateReading> readings;
  std::vector<Diagnostic> diagnostics;
  double elapsed_ms = 0.0;
};

/// Reads one verified candidate; throws on any per-candidate failure.
inline PlateReading read_candidate(const RasterImage& img, const PlateCandidate& cand, const KnnModel& model,
                                   const PipelineConfig& cfg) {
  PlateReading r;
  r.candidate = cand;
  r.region = deskew_and_crop(img, cand);
  const PlateTypeResult type = classify_plate_type(r.region.pixels, cfg.plate_type, r.region.strip_box);
  r.plate_type = type.type;
  r.type_votes = type.histogram;
  for (const CharacterGlyph& g : segment_plate(r.region, cfg.segmentation)) {
    const Classification c = classify(model, chain_code_features(g, cfg.features));
    r.text += c.label;
    r.per_glyph.push_back({c.label, c.confidence});
  }
  return r;
}

/// Localization, verification, deskew, segmentation, features, classification and
/// plate type, once per accepted candidate. Candidate failures become diagnostics.
inline ReadResult read_plate(const RasterImage& img, const KnnModel& model, const PipelineConfig& cfg = {}) {
  if (model.empty()) throw ModelEmpty();
  const auto start = std::chrono::steady_clock::now();
  ReadResult out;
  for (const PlateCandidate& cand : locate_plates(img, cfg.localization)) {
    try {
      out.readings.push_back(read_candidate(img, cand, model, cfg));
    } catch (const std::exception& e) {
      out.diagnostics.push_back({cand.box, e.what()});
    }
  }
  out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  for (PlateReading& r : out.readings) r.elapsed_ms = out.elapsed_ms;
  return out;
}

// ---------------------------------------------------------------------------
// Batch evaluation against generator truth

struct LabeledScene {
  std::string name;
  RasterImage image;
  std::vector<synth::PlateTruth> truth;
};

struct SceneOutcome {
  std::string name;
  int plates = 0;
  int located = 0;
  int characters = 0;
  int characters_correct = 0;
  int plates_read = 0;  // located with every character right
  int readings = 0;
  double elapsed_ms = 0.0;
};

struct BatchReport {
  int images = 0;
  int plates = 0;
  int located = 0;
  int characters = 0;
  int characters_correct = 0;
  int plates_read = 0;
  std::vector<SceneOutcome> scenes;

  static double percent(int num, int den) { return den == 0 ? 0.0 : 100.0 * num / den; }
  double location_percent() const { return percent(located, plates); }
  double character_percent() const { return percent(characters_correct, characters); }
  double median_latency_ms() const {
    if (scenes.empty()) return 0.0;
    std::vector<double> t;
    for (const auto& s : scenes) t.push_back(s.elapsed_ms);
    std::sort(t.begin(), t.end());
    const std::size_t n = t.size();
    return n % 2 ? t[n / 2] : (t[n / 2 - 1] + t[n / 2]) / 2.0;
  }
};

/// Matches each truth plate to the reading with the highest box IoU (>= 0.5) and
/// compares glyphs position by position.
inline SceneOutcome score_scene(const std::string& name, const std::vector<synth::PlateTruth>& truth,
                                const ReadResult& result) {
  SceneOutcome o;
  o.name = name;
  o.plates = static_cast<int>(truth.size());
  o.readings = static_cast<int>(result.readings.size());
  o.elapsed_ms = result.elapsed_ms;
  for (const auto& t : truth) {
    o.characters += static_cast<int>(t.glyphs.size());
    const PlateReading* best = nullptr;
    double best_iou = 0.5;
    for (const auto& r : result.readings) {
      const double v = iou(r.candidate.box, t.box);
      if (v >= best_iou) {
        best_iou = v;
        best = &r;
      }
    }
    if (!best) continue;
    ++o.located;
    int right = 0;
    for (std::size_t i = 0; i < t.glyphs.size() && i < best->per_glyph.size(); ++i)
      if (best->per_glyph[i].label == t.glyphs[i]) ++right;
    o.characters_correct += right;
    if (best->text == t.text) ++o.plates_read;
  }
  return o;
}

inline BatchReport aggregate(std::vector<SceneOutcome> outcomes) {
  BatchReport r;
  for (const auto& o : outcomes) {
    ++r.images;
    r.plates += o.plates;
    r.located += o.located;
    r.characters += o.characters;
    r.characters_correct += o.characters_correct;
    r.plates_read += o.plates_read;
  }
  r.scenes = std::move(outcomes);
  return r;
}

/// Scenes may run on several threads; outcomes stay in input order.
inline BatchReport batch_evaluate(const std::vector<LabeledScene>& scenes, const KnnModel& model,
                                  const PipelineConfig& cfg = {}, int jobs = 1) {
  std::vector<SceneOutcome> outcomes(scenes.size());
  auto work = [&](std::size_t i) {
    outcomes[i] = score_scene(scenes[i].name, scenes[i].truth, read_plate(scenes[i].image, model, cfg));
  };
  const std::size_t n_jobs = static_cast<std::size_t>(std::max(1, jobs));
  if (n_jobs == 1 || scenes.size() < 2) {
    for (std::size_t i = 0; i < scenes.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < n_jobs; ++j)
      pool.emplace_back([&, j] {
        for (std::size_t i = j; i < scenes.size(); i += n_jobs) work(i);
      });
    for (auto& t : pool) t.join();
  }
  return aggregate(std::move(outcomes));
}

inline void print_batch_report(std::ostream& os, const BatchReport& r, bool timing = false) {
  auto row = [&](const char* stage, int total, int correct, double pct) {
    os << std::left << std::setw(32) << stage << std::right << std::setw(8) << total << std::setw(10) << correct
       << std::setw(10) << format_percent(pct) << '\n';
  };
  os << "Images: " << r.images << '\n';
  os << std::left << std::setw(32) << "Stage" << std::right << std::setw(8) << "Total" << std::setw(10) << "Correct"
     << std::setw(10) << "Percent" << '\n';
  row("License plate location", r.plates, r.located, r.location_percent());
  row("Character recognition", r.characters, r.characters_correct, r.character_percent());
  row("Whole plate read", r.plates, r.plates_read, BatchReport::percent(r.plates_read, r.plates));
  if (timing) {
    std::ostringstream ms;
    ms << std::fixed << std::setprecision(2) << r.median_latency_ms();
    os << "Median latency (ms): " << ms.str() << '\n';
  }
}

}  // namespace vlpr
