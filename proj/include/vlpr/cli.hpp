#pragma once

// Command implementations behind the `vlpr` tool. Each takes an options struct
// and the output streams and returns a process exit code:
//   0 ok, 1 runtime errors occurred, 2 usage or configuration error.

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vlpr/classifier.hpp"
#include "vlpr/config.hpp"
#include "vlpr/corpus.hpp"
#include "vlpr/font.hpp"
#include "vlpr/gatesim.hpp"
#include "vlpr/image_io.hpp"
#include "vlpr/inventory.hpp"
#include "vlpr/pipeline.hpp"
#include "vlpr/synth.hpp"

namespace vlpr::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs a command body, mapping exception families to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const CorpusError& e) {
    err << "error: bad corpus: " << e.what() << '\n';
  } catch (const InvalidRatio& e) {
    err << "error: " << e.what() << '\n';
  } catch (const StratifyError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const InvalidRange& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

inline Config config_or_default(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

inline KnnModel load_model_or_usage(const std::string& path) {
  if (path.empty()) throw UsageError("--model is required");
  if (!fs::is_regular_file(path)) throw UsageError("model file not found: " + path);
  try {
    return load_model(path);
  } catch (const std::exception& e) {
    throw UsageError("cannot load model " + path + ": " + e.what());
  }
}

inline std::string format_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << ms;
  return os.str();
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string corpus;  // glyph corpus directory; empty with synthetic_per_class > 0
  int synthetic_per_class = 0;
  std::string out;
  double ratio = 0.7;
  std::uint64_t seed = 1;
  std::string config;
};

inline int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(o.ratio > 0.0 && o.ratio < 1.0)) throw UsageError("--ratio must lie strictly between 0 and 1");
    if (o.out.empty()) throw UsageError("--out is required");
    if (o.corpus.empty() == (o.synthetic_per_class <= 0))
      throw UsageError("give exactly one of --corpus or --synthetic");
    const Config cfg = config_or_default(o.config);
    const auto glyphs = o.corpus.empty() ? synth::glyph_corpus(cfg.alphabet, o.synthetic_per_class, o.seed)
                                         : read_glyph_corpus(o.corpus);
    KnnModel probe(cfg.alphabet, cfg.k);
    for (const auto& g : glyphs)
      if (probe.rank(g.label) < 0) throw UsageError("label '" + g.label + "' is not in the configured alphabet");
    const auto split = split_train_test(synth::to_samples(glyphs, cfg.pipeline.features), o.ratio, o.seed);
    const KnnModel model = train_model(split.train, cfg.alphabet, cfg.k);
    print_report(out, evaluate(model, split.test));
    save_model(model, o.out);
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// recognize

struct RecognizeOptions {
  std::vector<std::string> images;
  std::string model;
  std::string config;
  bool json = false;
  int jobs = 1;
};

inline json reading_json(const PlateReading& r) {
  json g = json::array();
  for (const auto& p : r.per_glyph) g.push_back({{"label", p.label}, {"confidence", p.confidence}});
  const Rect& b = r.candidate.box;
  return {{"text", r.text},
          {"type", to_string(r.plate_type)},
          {"box", {b.x, b.y, b.width, b.height}},
          {"tilt_deg", r.candidate.tilt * 180.0 / std::numbers::pi},
          {"votes", {{"red", r.type_votes.red_votes}, {"yellow", r.type_votes.yellow_votes},
                     {"white", r.type_votes.white_votes}}},
          {"glyphs", g},
          {"elapsed_ms", r.elapsed_ms}};
}

inline int cmd_recognize(const RecognizeOptions& o, std::ostream& out, std::ostream& err) {
  KnnModel model;
  Config cfg;
  if (const int rc = guarded(err, [&] {
        if (o.images.empty()) throw UsageError("no input images");
        model = load_model_or_usage(o.model);
        cfg = config_or_default(o.config);
        return kOk;
      }))
    return rc;

  struct Item {
    std::optional<ReadResult> result;
    std::string error;
  };
  std::vector<Item> items(o.images.size());
  auto work = [&](std::size_t i) {
    try {
      items[i].result = read_plate(io::read_image(o.images[i]), model, cfg.pipeline);
    } catch (const std::exception& e) {
      items[i].error = e.what();
    }
  };
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, o.jobs));
  if (jobs == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j)
      pool.emplace_back([&, j] {
        for (std::size_t i = j; i < items.size(); i += jobs) work(i);
      });
    for (auto& t : pool) t.join();
  }

  bool failed = false;
  json doc = json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& file = o.images[i];
    const Item& it = items[i];
    if (!it.result) {
      failed = true;
      if (o.json) doc.push_back({{"file", file}, {"error", it.error}});
      else out << "ERR " << file << ' ' << it.error << '\n';
      continue;
    }
    if (o.json) {
      json readings = json::array();
      for (const auto& r : it.result->readings) readings.push_back(reading_json(r));
      json diags = json::array();
      for (const auto& d : it.result->diagnostics)
        diags.push_back({{"box", {d.box.x, d.box.y, d.box.width, d.box.height}}, {"message", d.message}});
      doc.push_back({{"file", file}, {"readings", readings}, {"diagnostics", diags},
                     {"elapsed_ms", it.result->elapsed_ms}});
      continue;
    }
    if (it.result->readings.empty()) out << file << " - - -\n";
    for (const auto& r : it.result->readings)
      out << file << ' ' << r.text << ' ' << to_string(r.plate_type) << ' ' << format_ms(r.elapsed_ms) << '\n';
  }
  if (o.json) out << doc.dump(2) << '\n';
  return failed ? kRuntimeError : kOk;
}

// ---------------------------------------------------------------------------
// gen, gen-glyphs, font

struct GenOptions {
  std::uint64_t seed = 1;
  int count = 10;
  std::string out;
  synth::SceneSpec spec;
};

inline int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.out.empty()) throw UsageError("--out is required");
    if (o.count < 0) throw UsageError("--count must not be negative");
    try {
      o.spec.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    write_scene_set(o.out, o.seed, static_cast<std::size_t>(o.count), o.spec);
    out << "wrote " << o.count << " scenes to " << o.out << '\n';
    return kOk;
  });
}

struct GenGlyphsOptions {
  std::uint64_t seed = 1;
  int per_class = 50;
  std::string out;
  std::string config;  // alphabet source
};

inline int cmd_gen_glyphs(const GenGlyphsOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.out.empty()) throw UsageError("--out is required");
    if (o.per_class < 1) throw UsageError("--per-class must be positive");
    const Config cfg = config_or_default(o.config);
    for (const auto& l : cfg.alphabet)
      if (!font::has_glyph(l)) throw UsageError("the built-in font has no glyph for '" + l + "'");
    const auto corpus = synth::glyph_corpus(cfg.alphabet, o.per_class, o.seed);
    write_glyph_corpus(o.out, corpus);
    out << "wrote " << corpus.size() << " glyphs to " << o.out << '\n';
    return kOk;
  });
}

/// The undistorted normalized glyph of a font label.
inline CharacterGlyph reference_glyph(const std::string& label) {
  return normalize_glyph(font::render(label, 2 * kGlyphRows, 2 * kGlyphCols));
}

struct FontOptions {
  std::string out = "assets/font";
};

inline int cmd_font(const FontOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    fs::create_directories(o.out);
    std::size_t n = 0;
    for (const auto& [label, strokes] : font::glyphs()) {
      io::write_pbm(fs::path(o.out) / (label + ".pbm"), reference_glyph(label).bits);
      ++n;
    }
    out << "wrote " << n << " glyphs to " << o.out << '\n';
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string scenes;
  std::string model;
  std::string config;
  bool json = false;
  bool timing = false;
  int jobs = 1;
};

inline int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.scenes.empty()) throw UsageError("--scenes is required");
    const KnnModel model = load_model_or_usage(o.model);
    const Config cfg = config_or_default(o.config);
    const auto scenes = read_scene_set(o.scenes, model.alphabet());
    const BatchReport r = batch_evaluate(scenes, model, cfg.pipeline, o.jobs);
    if (!o.json) {
      print_batch_report(out, r, o.timing);
      return kOk;
    }
    json per = json::array();
    for (const auto& s : r.scenes) {
      json j = {{"file", s.name},       {"plates", s.plates},         {"located", s.located},
                {"characters", s.characters}, {"characters_correct", s.characters_correct},
                {"plates_read", s.plates_read}, {"readings", s.readings}};
      if (o.timing) j["elapsed_ms"] = s.elapsed_ms;
      per.push_back(j);
    }
    json doc = {{"images", r.images},
                {"plates", r.plates},
                {"located", r.located},
                {"location_percent", r.location_percent()},
                {"characters", r.characters},
                {"characters_correct", r.characters_correct},
                {"character_percent", r.character_percent()},
                {"plates_read", r.plates_read},
                {"scenes", per}};
    if (o.timing) doc["median_latency_ms"] = r.median_latency_ms();
    out << doc.dump(2) << '\n';
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// report

struct ReportOptions {
  std::string journal;
  std::string from;  // empty: unbounded
  std::string to;
  bool json = false;
};

inline int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.journal.empty()) throw UsageError("--journal is required");
    auto bound = [](const std::string& s, bool end, Timestamp fallback) {
      if (s.empty()) return fallback;
      const auto t = parse_range_bound(s, end);
      if (!t) throw UsageError("bad date '" + s + "'; use YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ");
      return *t;
    };
    const Timestamp from = bound(o.from, false, Timestamp{std::chrono::seconds{0}});
    const Timestamp to =
        bound(o.to, true, Timestamp{std::chrono::sys_days{std::chrono::year{9999} / 12 / 31}} + std::chrono::hours{24} -
                              std::chrono::seconds{1});
    const InventoryReport r = report(Journal(o.journal).read_all(), from, to);
    if (!o.json) {
      print_inventory_report(out, r);
      return kOk;
    }
    json rows = json::array();
    for (const auto& t : r.rows)
      rows.push_back({{"type", to_string(t.type)}, {"count", t.count}, {"revenue", format_money(t.revenue)}});
    out << json{{"from", format_timestamp(r.from)},
                {"to", format_timestamp(r.to)},
                {"rows", rows},
                {"total_count", r.total_count},
                {"total_revenue", format_money(r.total_revenue)}}
               .dump(2)
        << '\n';
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// serve

struct ServeOptions {
  std::string config;
  std::string journal;
  std::string model;
  bool pipe = false;
  std::string listen;  // host:port
};

/// Recognizer used by the gate: first reading of the image, if any.
inline std::function<std::optional<gate::GateReading>(const std::string&)> gate_recognizer(KnnModel model,
                                                                                          PipelineConfig cfg) {
  return [model = std::move(model), cfg = std::move(cfg)](const std::string& path) -> std::optional<gate::GateReading> {
    try {
      const ReadResult r = read_plate(io::read_image(path), model, cfg);
      if (r.readings.empty()) return std::nullopt;
      return gate::GateReading{r.readings.front().text, r.readings.front().plate_type};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
}

/// Scenario lines (`<tick> [command]`) in, `<tick> <payload>` lines out.
inline int serve_pipe(gate::GateSession& session, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string line;
  std::size_t n = 0;
  std::int64_t last = 0;
  bool failed = false;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream one(line);
    std::vector<gate::ScenarioLine> parsed;
    try {
      parsed = gate::parse_scenario(one);
    } catch (const std::exception& e) {
      err << "line " << n << ": " << e.what() << '\n';
      failed = true;
      continue;
    }
    for (const auto& l : parsed) {
      if (l.tick < last) {
        err << "line " << n << ": tick goes backwards\n";
        failed = true;
        continue;
      }
      last = l.tick;
      for (const auto& e : session.handle(l.tick, l.command)) out << gate::format_event(e) << '\n';
      out.flush();
    }
  }
  return failed ? kRuntimeError : kOk;
}

namespace detail {

inline int open_listener(const std::string& address) {
  const std::size_t colon = address.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects host:port");
  const std::string host = address.substr(0, colon), port = address.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
    throw UsageError("cannot resolve " + address);
  int fd = -1;
  for (addrinfo* a = res; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 4) == 0) break;
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(res);
  if (fd < 0) throw std::runtime_error("cannot listen on " + address);
  return fd;
}

inline bool send_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace detail

/// One client at a time; ticks are milliseconds since the service started.
inline void serve_socket(gate::GateSession& session, const std::string& address, std::ostream& log) {
  const int listener = detail::open_listener(address);
  log << "listening on " << address << '\n';
  const auto start = std::chrono::steady_clock::now();
  auto now_tick = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  };
  for (;;) {
    const int client = ::accept(listener, nullptr, nullptr);
    if (client < 0) continue;
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open) {
      const ssize_t n = ::recv(client, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t eol;
      while ((eol = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, eol);
        buffer.erase(0, eol + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string reply;
        for (const auto& e : session.handle(now_tick(), line)) reply += e.payload + '\n';
        if (!reply.empty() && !detail::send_all(client, reply)) {
          open = false;
          break;
        }
      }
    }
    ::close(client);
  }
}

inline int cmd_serve(const ServeOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.pipe == !o.listen.empty()) throw UsageError("give exactly one of --pipe or --listen");
    if (o.journal.empty()) throw UsageError("--journal is required");
    const KnnModel model = load_model_or_usage(o.model);
    Config cfg = config_or_default(o.config);
    // A live socket gate stamps records with wall time unless an epoch is configured.
    if (!o.pipe && cfg.gate.epoch == Timestamp{})
      cfg.gate.epoch = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    const Journal journal(o.journal);
    const std::uint64_t first_serial = journal.read_all().size() + 1;
    gate::GateSession session(cfg.gate, gate_recognizer(model, cfg.pipeline),
                              [journal](const ParkingRecord& r) { journal.append(r); }, first_serial);
    if (o.pipe) return serve_pipe(session, in, out, err);
    serve_socket(session, o.listen, err);
    return kOk;
  });
}

}  // namespace vlpr::cli
