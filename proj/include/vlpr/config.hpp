#pragma once

// INI configuration: `[section]` headers, `key = value` lines, `#` or `;`
// comments. Unknown sections and keys are errors.

#include <charconv>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlpr/classifier.hpp"
#include "vlpr/gatesim.hpp"
#include "vlpr/pipeline.hpp"

namespace vlpr {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "config line " + std::to_string(line) + ": " + what : "config: " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Config {
  PipelineConfig pipeline;
  int k = 1;
  std::vector<std::string> alphabet = default_alphabet();
  gate::GateConfig gate;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct IniValue {
  std::string value;
  std::size_t line = 0;
};

using IniSections = std::map<std::string, std::map<std::string, IniValue>>;

inline IniSections parse_ini(std::istream& in) {
  IniSections out;
  std::string raw, section;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(n, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(n, "empty section name");
      out[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(n, "expected key = value");
    if (section.empty()) throw ConfigError(n, "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(n, "empty key");
    if (out[section].count(key)) throw ConfigError(n, "duplicate key '" + key + "'");
    out[section][key] = {trim(line.substr(eq + 1)), n};
  }
  return out;
}

inline double to_double(const IniValue& v, double lo, double hi) {
  double d = 0;
  auto [p, ec] = std::from_chars(v.value.data(), v.value.data() + v.value.size(), d);
  if (ec != std::errc() || p != v.value.data() + v.value.size()) throw ConfigError(v.line, "not a number: '" + v.value + "'");
  if (!(d >= lo && d <= hi))
    throw ConfigError(v.line, "value " + v.value + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return d;
}

inline long long to_int(const IniValue& v, long long lo, long long hi) {
  long long i = 0;
  auto [p, ec] = std::from_chars(v.value.data(), v.value.data() + v.value.size(), i);
  if (ec != std::errc() || p != v.value.data() + v.value.size()) throw ConfigError(v.line, "not an integer: '" + v.value + "'");
  if (i < lo || i > hi)
    throw ConfigError(v.line, "value " + v.value + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return i;
}

inline bool to_bool(const IniValue& v) {
  if (v.value == "true") return true;
  if (v.value == "false") return false;
  throw ConfigError(v.line, "expected true or false, got '" + v.value + "'");
}

inline std::vector<std::string> to_alphabet(const IniValue& v) {
  std::vector<std::string> out;
  if (v.value.find(',') == std::string::npos) {
    for (char c : v.value)
      if (c != ' ') out.emplace_back(1, c);
  } else {
    std::stringstream ss(v.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
  }
  if (out.size() < 2) throw ConfigError(v.line, "alphabet needs at least two labels");
  try {
    KnnModel check(out, 1);
  } catch (const InvalidModel& e) {
    throw ConfigError(v.line, e.what());
  }
  return out;
}

// Consumes keys of one section, then complains about anything left over.
class SectionReader {
 public:
  SectionReader(const std::string& name, std::map<std::string, IniValue> keys)
      : name_(name), keys_(std::move(keys)) {}

  const IniValue* take(const std::string& key) {
    auto it = keys_.find(key);
    if (it == keys_.end()) return nullptr;
    taken_.push_back(it->second);
    keys_.erase(it);
    return &taken_.back();
  }

  void real(const std::string& key, double& out, double lo, double hi) {
    if (const IniValue* v = take(key)) out = to_double(*v, lo, hi);
  }
  template <class Int>
  void integer(const std::string& key, Int& out, long long lo, long long hi) {
    if (const IniValue* v = take(key)) out = static_cast<Int>(to_int(*v, lo, hi));
  }

  void finish() const {
    if (!keys_.empty()) {
      const auto& [key, v] = *keys_.begin();
      throw ConfigError(v.line, "unknown key '" + key + "' in [" + name_ + "]");
    }
  }

 private:
  std::string name_;
  std::map<std::string, IniValue> keys_;
  std::deque<IniValue> taken_;
};

inline void read_band(SectionReader& r, const std::string& prefix, ChromaBand& b) {
  r.real(prefix + "_hue_min", b.hue_min, 0, 1);
  r.real(prefix + "_hue_max", b.hue_max, 0, 1);
  r.real(prefix + "_sat_min", b.sat_min, 0, 1);
  r.real(prefix + "_val_min", b.val_min, 0, 1);
}

}  // namespace detail

inline Config parse_config(std::istream& in) {
  using namespace detail;
  IniSections ini = parse_ini(in);
  Config c;
  for (auto& [name, keys] : ini) {
    SectionReader r(name, keys);
    if (name == "localization") {
      auto& l = c.pipeline.localization;
      read_band(r, "blue", l.blue);
      r.integer("min_area", l.min_area, 1, 1'000'000);
      r.real("strip_ratio_min", l.strip_ratio_min, 0.1, 100);
      r.real("strip_ratio_max", l.strip_ratio_max, 0.1, 100);
      r.real("plate_width_factor", l.plate_width_factor, 0.1, 100);
      r.real("aspect_min", l.aspect_min, 0.1, 100);
      r.real("aspect_max", l.aspect_max, 0.1, 100);
      r.integer("min_jumps", l.min_jumps, 0, 10'000);
      r.integer("tilt_refine_steps", l.tilt_refine_steps, 0, 100);
      r.real("tilt_refine_step", l.tilt_refine_step, 1e-5, 0.1);
      if (l.strip_ratio_min > l.strip_ratio_max) throw ConfigError(0, "strip_ratio_min exceeds strip_ratio_max");
      if (l.aspect_min > l.aspect_max) throw ConfigError(0, "aspect_min exceeds aspect_max");
    } else if (name == "segmentation") {
      auto& s = c.pipeline.segmentation;
      r.real("min_char_area", s.min_char_area, 0, 1);
      r.real("min_char_height", s.min_char_height, 0, 1);
      r.integer("max_chars", s.max_chars, 1, 64);
      if (const IniValue* v = r.take("reject_border")) s.reject_border = to_bool(*v);
    } else if (name == "features") {
      if (const IniValue* v = r.take("normalization")) {
        if (v->value == "off") c.pipeline.features.normalize = FeatureNormalization::Off;
        else if (v->value == "per-glyph") c.pipeline.features.normalize = FeatureNormalization::PerGlyph;
        else throw ConfigError(v->line, "normalization must be off or per-glyph");
      }
    } else if (name == "classifier") {
      r.integer("k", c.k, 1, 1000);
      if (const IniValue* v = r.take("alphabet")) c.alphabet = to_alphabet(*v);
    } else if (name == "plate_type") {
      auto& p = c.pipeline.plate_type;
      if (const IniValue* v = r.take("preset")) {
        if (v->value == "classic") p = PlateTypeConfig::classic();
        else if (v->value == "standard-hue") p = PlateTypeConfig::standard_hue();
        else throw ConfigError(v->line, "preset must be classic or standard-hue");
      }
      read_band(r, "red", p.red);
      read_band(r, "yellow", p.yellow);
      r.real("white_sat_max", p.white.sat_max, 0, 1);
      r.real("white_val_min", p.white.val_min, 0, 1);
    } else if (name == "tariff") {
      for (PlateType t : {PlateType::Red, PlateType::Yellow, PlateType::White}) {
        std::string key = to_string(t);
        key[0] = static_cast<char>(key[0] - 'A' + 'a');
        if (const IniValue* v = r.take(key)) {
          const auto cents = parse_money(v->value);
          if (!cents) throw ConfigError(v->line, "bad amount '" + v->value + "'");
          c.gate.tariff[t] = *cents;
        }
      }
    } else if (name == "gate") {
      r.integer("open_ms", c.gate.open_ms, 0, 3'600'000);
      r.integer("reject_cooldown_ms", c.gate.reject_cooldown_ms, 0, 3'600'000);
      if (const IniValue* v = r.take("seg7")) {
        if (v->value == "amount") c.gate.seg7 = gate::Seg7Mode::Amount;
        else if (v->value == "daily-count") c.gate.seg7 = gate::Seg7Mode::DailyCount;
        else throw ConfigError(v->line, "seg7 must be amount or daily-count");
      }
      if (const IniValue* v = r.take("epoch")) {
        const auto t = parse_timestamp(v->value);
        if (!t) throw ConfigError(v->line, "epoch must look like 2024-01-01T00:00:00Z");
        c.gate.epoch = *t;
      }
    } else {
      const std::size_t line = keys.empty() ? 0 : keys.begin()->second.line;
      throw ConfigError(line, "unknown section [" + name + "]");
    }
    r.finish();
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path);
  return parse_config(in);
}

/// Every key with its current value; parse_config reads it back unchanged.
inline void write_config(std::ostream& os, const Config& c) {
  auto band = [&](const std::string& prefix, const ChromaBand& b) {
    os << prefix << "_hue_min = " << format_number(b.hue_min) << '\n'
       << prefix << "_hue_max = " << format_number(b.hue_max) << '\n'
       << prefix << "_sat_min = " << format_number(b.sat_min) << '\n'
       << prefix << "_val_min = " << format_number(b.val_min) << '\n';
  };
  const auto& l = c.pipeline.localization;
  os << "[localization]\n";
  band("blue", l.blue);
  os << "min_area = " << l.min_area << '\n'
     << "strip_ratio_min = " << format_number(l.strip_ratio_min) << '\n'
     << "strip_ratio_max = " << format_number(l.strip_ratio_max) << '\n'
     << "plate_width_factor = " << format_number(l.plate_width_factor) << '\n'
     << "aspect_min = " << format_number(l.aspect_min) << '\n'
     << "aspect_max = " << format_number(l.aspect_max) << '\n'
     << "min_jumps = " << l.min_jumps << '\n'
     << "tilt_refine_steps = " << l.tilt_refine_steps << '\n'
     << "tilt_refine_step = " << format_number(l.tilt_refine_step) << "\n\n";
  const auto& s = c.pipeline.segmentation;
  os << "[segmentation]\n"
     << "min_char_area = " << format_number(s.min_char_area) << '\n'
     << "min_char_height = " << format_number(s.min_char_height) << '\n'
     << "max_chars = " << s.max_chars << '\n'
     << "reject_border = " << (s.reject_border ? "true" : "false") << "\n\n";
  os << "[features]\nnormalization = "
     << (c.pipeline.features.normalize == FeatureNormalization::PerGlyph ? "per-glyph" : "off") << "\n\n";
  os << "[classifier]\nk = " << c.k << "\nalphabet = ";
  for (std::size_t i = 0; i < c.alphabet.size(); ++i) os << (i ? "," : "") << c.alphabet[i];
  os << "\n\n[plate_type]\n";
  band("red", c.pipeline.plate_type.red);
  band("yellow", c.pipeline.plate_type.yellow);
  os << "white_sat_max = " << format_number(c.pipeline.plate_type.white.sat_max) << '\n'
     << "white_val_min = " << format_number(c.pipeline.plate_type.white.val_min) << "\n\n";
  os << "[tariff]\nred = " << format_money(c.gate.tariff[PlateType::Red])
     << "\nyellow = " << format_money(c.gate.tariff[PlateType::Yellow])
     << "\nwhite = " << format_money(c.gate.tariff[PlateType::White]) << "\n\n";
  os << "[gate]\nopen_ms = " << c.gate.open_ms << "\nreject_cooldown_ms = " << c.gate.reject_cooldown_ms
     << "\nseg7 = " << (c.gate.seg7 == gate::Seg7Mode::Amount ? "amount" : "daily-count")
     << "\nepoch = " << format_timestamp(c.gate.epoch) << '\n';
}

}  // namespace vlpr
