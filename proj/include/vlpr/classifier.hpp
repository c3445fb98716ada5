#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vlpr/features.hpp"

namespace vlpr {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelEmpty : public std::runtime_error {
 public:
  ModelEmpty() : std::runtime_error("model has no samples") {}
};

class InvalidModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StratifyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidRatio : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Model file parse failure; offset is the byte position of the bad line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// d = sqrt(sum_k (x_k - y_k)^2)
inline double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DimensionError("feature length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double euclidean_distance(const FeatureVector& x, const FeatureVector& y) {
  return euclidean_distance(std::span<const double>(x.counts), std::span<const double>(y.counts));
}

struct LabeledSample {
  FeatureVector features;
  std::string label;
};

/// Default alphabet: digits, then Latin capitals without I, O and Q.
inline std::vector<std::string> default_alphabet() {
  std::vector<std::string> a;
  for (char c : std::string("0123456789ABCDEFGHJKLMNPRSTUVWXYZ")) a.emplace_back(1, c);
  return a;
}

class KnnModel {
 public:
  KnnModel() : KnnModel(default_alphabet(), 1) {}
  KnnModel(std::vector<std::string> alphabet, int k) : alphabet_(std::move(alphabet)), k_(k) {
    if (k < 1) throw InvalidModel("k must be >= 1");
    for (std::size_t i = 0; i < alphabet_.size(); ++i) {
      const std::string& l = alphabet_[i];
      if (l.empty() || l.find_first_of(" \t\r\n|") != std::string::npos)
        throw InvalidModel("alphabet label '" + l + "' is empty or contains separators");
      if (!rank_.emplace(l, static_cast<int>(i)).second) throw InvalidModel("duplicate alphabet label '" + l + "'");
    }
  }

  void add(LabeledSample s) {
    if (!rank_.count(s.label)) throw InvalidModel("label '" + s.label + "' is not in the model alphabet");
    samples_.push_back(std::move(s));
  }

  const std::vector<LabeledSample>& samples() const { return samples_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int k() const { return k_; }
  void set_k(int k) {
    if (k < 1) throw InvalidModel("k must be >= 1");
    k_ = k;
  }
  bool empty() const { return samples_.empty(); }

  /// Position of the label in the alphabet, or -1.
  int rank(const std::string& label) const {
    auto it = rank_.find(label);
    return it == rank_.end() ? -1 : it->second;
  }

 private:
  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, int> rank_;
  std::vector<LabeledSample> samples_;
  int k_ = 1;
};

struct Classification {
  std::string label;
  double confidence = 0.0;
  double nearest = 0.0;  // distance to the closest stored sample
};

/// Majority vote among the k nearest samples. Neighbors are ranked by distance,
/// then by alphabet rank, so sample order never matters. Vote ties go to the
/// smaller mean distance, then to the earlier alphabet label.
inline Classification classify(const KnnModel& model, const FeatureVector& q) {
  if (model.empty()) throw ModelEmpty();
  const auto& samples = model.samples();
  const std::size_t k = static_cast<std::size_t>(model.k());
  if (k > samples.size()) throw InvalidModel("k exceeds the number of stored samples");

  struct Neighbor {
    double d2;
    int rank;
  };
  std::vector<Neighbor> all;
  all.reserve(samples.size());
  for (const auto& s : samples) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < q.counts.size(); ++i) {
      const double d = s.features.counts[i] - q.counts[i];
      d2 += d * d;
    }
    all.push_back({d2, model.rank(s.label)});
  }
  auto closer = [](const Neighbor& a, const Neighbor& b) { return a.d2 != b.d2 ? a.d2 < b.d2 : a.rank < b.rank; };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);

  struct Tally {
    int votes = 0;
    double dist_sum = 0.0;
  };
  std::map<int, Tally> tally;
  for (std::size_t i = 0; i < k; ++i) {
    Tally& t = tally[all[i].rank];
    ++t.votes;
    t.dist_sum += std::sqrt(all[i].d2);
  }
  int best = -1;
  for (const auto& [rank, t] : tally) {
    if (best < 0) {
      best = rank;
      continue;
    }
    const Tally& b = tally[best];
    const double mean_t = t.dist_sum / t.votes, mean_b = b.dist_sum / b.votes;
    if (t.votes > b.votes || (t.votes == b.votes && mean_t < mean_b)) best = rank;
  }
  int runner_up = 0;
  for (const auto& [rank, t] : tally)
    if (rank != best) runner_up = std::max(runner_up, t.votes);

  Classification out;
  out.label = model.alphabet()[static_cast<std::size_t>(best)];
  out.confidence = static_cast<double>(static_cast<int>(k) - runner_up) / static_cast<double>(k);
  out.nearest = std::sqrt(all.front().d2);
  return out;
}

namespace detail {

// Unbiased draw in [0, n) from a 64-bit engine; fixed across standard libraries.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

}  // namespace detail

struct TrainTestSplit {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
};

/// Per-class stratified split. Each class keeps floor(ratio * n) samples (at
/// least one) for training and the rest for testing. Classes are visited in
/// lexicographic label order; the shuffle is seeded.
inline TrainTestSplit split_train_test(const std::vector<LabeledSample>& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidRatio("train ratio must lie strictly between 0 and 1");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_class[corpus[i].label].push_back(i);
  std::mt19937_64 rng(seed);
  TrainTestSplit out;
  for (auto& [label, idx] : by_class) {
    if (idx.size() < 2) throw StratifyError("class '" + label + "' has fewer than 2 samples");
    detail::seeded_shuffle(idx, rng);
    std::size_t n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(idx.size()) + 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) (i < n_train ? out.train : out.test).push_back(corpus[idx[i]]);
  }
  return out;
}

inline KnnModel train_model(const std::vector<LabeledSample>& train, std::vector<std::string> alphabet, int k) {
  KnnModel m(std::move(alphabet), k);
  for (const auto& s : train) m.add(s);
  return m;
}

struct ClassRow {
  std::string label;
  std::size_t total = 0;
  std::size_t correct = 0;
  double percent() const { return total ? 100.0 * static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::vector<ClassRow> per_class;                             // alphabet order, classes seen in test
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (truth, predicted) -> count

  double percent() const { return total ? 100.0 * static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

inline EvalReport evaluate(const KnnModel& model, const std::vector<LabeledSample>& test) {
  EvalReport r;
  std::map<int, ClassRow> rows;
  for (const auto& s : test) {
    const Classification c = classify(model, s.features);
    const bool ok = c.label == s.label;
    ++r.total;
    r.correct += ok ? 1 : 0;
    int rank = model.rank(s.label);
    if (rank < 0) rank = static_cast<int>(model.alphabet().size());
    ClassRow& row = rows[rank];
    row.label = s.label;
    ++row.total;
    row.correct += ok ? 1 : 0;
    ++r.confusion[{s.label, c.label}];
  }
  for (auto& [rank, row] : rows) r.per_class.push_back(row);
  return r;
}

inline std::string format_percent(double p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << p << "%";
  return os.str();
}

/// Total / correct / percent table, one row per class plus the overall row.
inline void print_report(std::ostream& os, const EvalReport& r, const std::string& technique = "Direction Chain Code") {
  os << "Total Image\tTechnique\tCorrect character recognition\tPercent Efficiency\n";
  os << r.total << "\t" << technique << "\t" << r.correct << "\t" << format_percent(r.percent()) << "\n";
  os << "\nclass\ttotal\tcorrect\tpercent\n";
  for (const auto& row : r.per_class)
    os << row.label << "\t" << row.total << "\t" << row.correct << "\t" << format_percent(row.percent()) << "\n";
  bool header = false;
  for (const auto& [key, n] : r.confusion) {
    if (key.first == key.second) continue;
    if (!header) {
      os << "\nconfusions (truth -> predicted)\n";
      header = true;
    }
    os << key.first << " -> " << key.second << "\t" << n << "\n";
  }
}

// ---------------------------------------------------------------------------
// Model file
//
//   VLPR-KNN
//   version 1
//   k <k>
//   alphabet <n> <label>...
//   samples <count>
//   <label> <v0> ... <v119>          (one line per sample)
//
// LF line endings. Values print in shortest round-trip form, so integer counts
// appear as plain integers.

inline constexpr const char* kModelMagic = "VLPR-KNN";
inline constexpr int kModelVersion = 1;

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string serialize_model(const KnnModel& m) {
  std::string out;
  out += kModelMagic;
  out += "\nversion " + std::to_string(kModelVersion) + "\n";
  out += "k " + std::to_string(m.k()) + "\n";
  out += "alphabet " + std::to_string(m.alphabet().size());
  for (const auto& l : m.alphabet()) out += " " + l;
  out += "\nsamples " + std::to_string(m.samples().size()) + "\n";
  for (const auto& s : m.samples()) {
    out += s.label;
    for (double v : s.features.counts) {
      out += ' ';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

namespace detail {

struct LineReader {
  const std::string& text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }

  // Returns the next LF-terminated line and its starting offset.
  std::pair<std::string_view, std::size_t> next(const char* what) {
    if (done()) throw FormatError(std::string("unexpected end of file, expected ") + what, pos);
    const std::size_t start = pos;
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) throw FormatError(std::string("unterminated line in ") + what, start);
    pos = nl + 1;
    return {std::string_view(text).substr(start, nl - start), start};
  }
};

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= line.size()) {
    const std::size_t j = line.find(' ', i);
    const std::size_t end = j == std::string_view::npos ? line.size() : j;
    out.push_back(line.substr(i, end - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t offset, const char* what) {
  T v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw FormatError(std::string("bad ") + what + " '" + std::string(tok) + "'", offset);
  return v;
}

inline std::size_t keyed_count(LineReader& r, const char* key) {
  auto [line, off] = r.next(key);
  const auto toks = split_spaces(line);
  if (toks.size() != 2 || toks[0] != key) throw FormatError(std::string("expected '") + key + " <n>'", off);
  return parse_number<std::size_t>(toks[1], off, key);
}

}  // namespace detail

inline KnnModel parse_model(const std::string& text) {
  detail::LineReader r{text};
  {
    auto [line, off] = r.next("magic");
    if (line != kModelMagic) throw FormatError("bad magic", off);
  }
  {
    const std::size_t v = detail::keyed_count(r, "version");
    if (v != static_cast<std::size_t>(kModelVersion)) throw FormatError("unsupported version " + std::to_string(v), 0);
  }
  const std::size_t k = detail::keyed_count(r, "k");
  std::vector<std::string> alphabet;
  {
    auto [line, off] = r.next("alphabet");
    const auto toks = detail::split_spaces(line);
    if (toks.size() < 2 || toks[0] != "alphabet") throw FormatError("expected alphabet line", off);
    const auto n = detail::parse_number<std::size_t>(toks[1], off, "alphabet size");
    if (toks.size() != n + 2) throw FormatError("alphabet size does not match its labels", off);
    for (std::size_t i = 0; i < n; ++i) alphabet.emplace_back(toks[i + 2]);
  }
  KnnModel model = [&] {
    try {
      return KnnModel(alphabet, static_cast<int>(k));
    } catch (const InvalidModel& e) {
      throw FormatError(e.what(), 0);
    }
  }();
  const std::size_t count = detail::keyed_count(r, "samples");
  for (std::size_t i = 0; i < count; ++i) {
    auto [line, off] = r.next("sample");
    const auto toks = detail::split_spaces(line);
    if (toks.size() != 1 + kFeatureCount) throw FormatError("sample line needs a label and 120 values", off);
    LabeledSample s;
    s.label = std::string(toks[0]);
    for (int j = 0; j < kFeatureCount; ++j) {
      const double v = detail::parse_number<double>(toks[static_cast<std::size_t>(j) + 1], off, "feature value");
      if (!(v >= 0.0) || !std::isfinite(v)) throw FormatError("negative or non-finite feature value", off);
      s.features.counts[static_cast<std::size_t>(j)] = v;
    }
    if (model.rank(s.label) < 0) throw FormatError("sample label '" + s.label + "' not in alphabet", off);
    model.add(std::move(s));
  }
  if (!r.done()) throw FormatError("trailing data after samples", r.pos);
  return model;
}

inline void save_model(const KnnModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model " + path.string());
  const std::string text = serialize_model(m);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for model " + path.string());
}

inline KnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace vlpr
