#pragma once

// On-disk corpora.
//
// Glyph corpus: one directory of `<label>_<serial>.pbm` files (P4, 15x30). The
// label is everything before the last underscore.
//
// Scene set: images plus `truth.txt`, one line per plate:
//   file|plate_text|type|tilt_degrees|x,y,w,h
// A scene without plates is listed once as `file|-|-|-|-`.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlpr/features.hpp"
#include "vlpr/image_io.hpp"
#include "vlpr/pipeline.hpp"
#include "vlpr/synth.hpp"

namespace vlpr {

namespace fs = std::filesystem;

/// Bad corpus layout; carries the offending path.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(const fs::path& path, const std::string& why)
      : std::runtime_error(path.string() + ": " + why), path_(path) {}
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw CorpusError(dir, "not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string glyph_file_name(const std::string& label, std::size_t serial) {
  char num[16];
  std::snprintf(num, sizeof num, "%05zu", serial);
  return label + "_" + num + ".pbm";
}

inline void write_glyph_corpus(const fs::path& dir, const std::vector<synth::GlyphSample>& samples) {
  fs::create_directories(dir);
  std::size_t serial = 0;
  for (const auto& s : samples) io::write_pbm(dir / glyph_file_name(s.label, serial++), s.glyph.bits);
}

inline std::vector<synth::GlyphSample> read_glyph_corpus(const fs::path& dir) {
  std::vector<synth::GlyphSample> out;
  for (const fs::path& p : sorted_files(dir, ".pbm")) {
    const std::string stem = p.stem().string();
    const std::size_t us = stem.rfind('_');
    if (us == std::string::npos || us == 0) throw CorpusError(p, "expected <label>_<serial>.pbm");
    BinaryImage bits;
    try {
      bits = io::read_pbm(p);
    } catch (const std::exception& e) {
      throw CorpusError(p, e.what());
    }
    if (bits.width() != kGlyphCols || bits.height() != kGlyphRows) throw CorpusError(p, "glyph must be 15x30");
    if (bits.count() == 0) throw CorpusError(p, "glyph is empty");
    out.push_back({stem.substr(0, us), make_glyph(std::move(bits))});
  }
  if (out.empty()) throw CorpusError(dir, "no .pbm glyphs found");
  return out;
}

struct TruthLine {
  std::string file;
  std::optional<synth::PlateTruth> plate;
};

inline std::string format_degrees(double radians) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", radians * 180.0 / std::numbers::pi);
  return buf;
}

inline void write_truth(std::ostream& os, const std::string& file, const std::vector<synth::PlateTruth>& truth) {
  if (truth.empty()) {
    os << file << "|-|-|-|-\n";
    return;
  }
  for (const auto& t : truth)
    os << file << '|' << t.text << '|' << to_string(t.type) << '|' << format_degrees(t.tilt) << '|' << t.box.x << ','
       << t.box.y << ',' << t.box.width << ',' << t.box.height << '\n';
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

/// Glyph labels of a truth string, longest alphabet match first.
inline std::vector<std::string> split_labels(const std::string& text, const std::vector<std::string>& alphabet) {
  std::vector<std::string> by_length = alphabet;
  std::stable_sort(by_length.begin(), by_length.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    bool hit = false;
    for (const auto& l : by_length)
      if (!l.empty() && text.compare(i, l.size(), l) == 0) {
        out.push_back(l);
        i += l.size();
        hit = true;
        break;
      }
    if (!hit) {
      out.emplace_back(1, text[i]);
      ++i;
    }
  }
  return out;
}

inline std::vector<TruthLine> read_truth(const fs::path& manifest, const std::vector<std::string>& alphabet) {
  std::ifstream in(manifest);
  if (!in) throw CorpusError(manifest, "cannot open truth manifest");
  std::vector<TruthLine> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = detail::split(line, '|');
    const std::string where = "line " + std::to_string(n) + ": ";
    if (f.size() != 5) throw CorpusError(manifest, where + "expected 5 fields");
    TruthLine t{f[0], std::nullopt};
    if (f[1] == "-") {
      out.push_back(t);
      continue;
    }
    synth::PlateTruth p;
    p.text = f[1];
    p.glyphs = split_labels(p.text, alphabet);
    const auto type = parse_plate_type(f[2]);
    if (!type) throw CorpusError(manifest, where + "bad plate type");
    p.type = *type;
    try {
      p.tilt = std::stod(f[3]) * std::numbers::pi / 180.0;
      const auto box = detail::split(f[4], ',');
      if (box.size() != 4) throw std::invalid_argument("box");
      p.box = {std::stoi(box[0]), std::stoi(box[1]), std::stoi(box[2]), std::stoi(box[3])};
    } catch (const std::exception&) {
      throw CorpusError(manifest, where + "bad tilt or box");
    }
    t.plate = p;
    out.push_back(t);
  }
  return out;
}

/// Loads a scene directory written by write_scene_set, in manifest order.
inline std::vector<LabeledScene> read_scene_set(const fs::path& dir, const std::vector<std::string>& alphabet) {
  const auto lines = read_truth(dir / "truth.txt", alphabet);
  std::vector<LabeledScene> out;
  for (const auto& l : lines) {
    if (out.empty() || out.back().name != l.file) {
      LabeledScene s;
      s.name = l.file;
      try {
        s.image = io::read_image(dir / l.file);
      } catch (const std::exception& e) {
        throw CorpusError(dir / l.file, e.what());
      }
      out.push_back(std::move(s));
    }
    if (l.plate) out.back().truth.push_back(*l.plate);
  }
  return out;
}

inline std::string scene_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu.bmp", i);
  return buf;
}

/// Seed of the i-th scene in a set.
inline std::uint64_t scene_seed(std::uint64_t seed, std::size_t i) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i) * 0xBF58476D1CE4E5B9ULL + 1;
}

inline void write_scene_set(const fs::path& dir, std::uint64_t seed, std::size_t count, const synth::SceneSpec& spec) {
  fs::create_directories(dir);
  std::ostringstream manifest;
  for (std::size_t i = 0; i < count; ++i) {
    const synth::SyntheticScene scene = synth::generate_scene(scene_seed(seed, i), spec);
    const std::string name = scene_file_name(i);
    io::write_image(dir / name, scene.image);
    write_truth(manifest, name, scene.truth);
  }
  std::ofstream out(dir / "truth.txt", std::ios::binary);
  out << manifest.str();
  if (!out) throw std::runtime_error("cannot write " + (dir / "truth.txt").string());
}

}  // namespace vlpr
