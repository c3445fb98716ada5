#pragma once

// Parking gate state machine behind a line protocol.
//
// Inbound:  SENSOR VEHICLE | IMAGE <path>
// Outbound: CAPTURE | BARRIER OPEN <ms> | LCD <text> | SEG7 <value> | RECEIPT <serial> | ERR <code>
//
// Time is a logical millisecond tick supplied with every input; timers expire
// when an input arrives at or past their deadline.

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vlpr/inventory.hpp"
#include "vlpr/platetype.hpp"

namespace vlpr::gate {

enum class Phase { Idle, Capturing, Recognizing, BarrierOpen, Rejected };

inline std::string to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "IDLE";
    case Phase::Capturing: return "CAPTURING";
    case Phase::Recognizing: return "RECOGNIZING";
    case Phase::BarrierOpen: return "BARRIER_OPEN";
    case Phase::Rejected: return "REJECTED";
  }
  return "?";
}

enum class Seg7Mode { Amount, DailyCount };

struct GateConfig {
  std::int64_t open_ms = 5000;
  std::int64_t reject_cooldown_ms = 2000;
  Seg7Mode seg7 = Seg7Mode::Amount;
  Timestamp epoch{};  // wall time of tick 0
  Tariff tariff;
};

struct GateState {
  Phase phase = Phase::Idle;
  std::int64_t deadline = 0;  // BarrierOpen / Rejected expiry tick
  std::int64_t tick = 0;      // last input tick
  std::int64_t day = 0;       // days since epoch of the last accepted vehicle
  std::int64_t daily_count = 0;

  std::int64_t remaining_ms() const {
    return phase == Phase::BarrierOpen || phase == Phase::Rejected ? std::max<std::int64_t>(0, deadline - tick) : 0;
  }
  friend bool operator==(const GateState&, const GateState&) = default;
};

struct GateReading {
  std::string text;
  PlateType type = PlateType::White;
};

/// Everything step() may touch outside the state value.
struct GateDeps {
  std::function<std::optional<GateReading>(const std::string& image_path)> recognize;
  std::function<void(const ParkingRecord&)> append;  // journal writer
  ReceiptPrinter* printer = nullptr;
  std::function<void(const Receipt&)> on_receipt;
};

struct GateEvent {
  enum class Direction { Inbound, Outbound };
  Direction direction = Direction::Outbound;
  std::string payload;
  std::int64_t tick = 0;

  friend bool operator==(const GateEvent&, const GateEvent&) = default;
};

struct StepResult {
  GateState state;
  std::vector<GateEvent> out;
};

inline constexpr std::string_view kPermitText = "You Have Permission to go";
inline constexpr std::string_view kFailText = "Recognition Failed";

inline Timestamp clock_at(const GateConfig& cfg, std::int64_t tick) {
  return cfg.epoch + std::chrono::seconds{tick / 1000};
}

/// Expires timers due at `tick` without consuming an event.
inline GateState advance(GateState s, std::int64_t tick) {
  if (tick < s.tick) throw std::invalid_argument("gate ticks must not go backwards");
  s.tick = tick;
  if ((s.phase == Phase::BarrierOpen || s.phase == Phase::Rejected) && tick >= s.deadline) {
    s.phase = Phase::Idle;
    s.deadline = 0;
  }
  return s;
}

/// One inbound line at `tick`. An empty line only advances time.
inline StepResult step(const GateState& current, std::int64_t tick, std::string_view line, const GateConfig& cfg,
                       const GateDeps& deps) {
  StepResult r{advance(current, tick), {}};
  GateState& s = r.state;
  auto emit = [&](std::string payload) {
    r.out.push_back({GateEvent::Direction::Outbound, std::move(payload), tick});
  };
  if (line.empty()) return r;

  if (line == "SENSOR VEHICLE") {
    if (s.phase != Phase::Idle) {
      emit("ERR BUSY");
      return r;
    }
    s.phase = Phase::Capturing;
    emit("CAPTURE");
    return r;
  }

  if (line.substr(0, 6) == "IMAGE ") {
    const std::string path(line.substr(6));
    if (path.empty()) {
      emit("ERR BAD_COMMAND");
      return r;
    }
    if (s.phase != Phase::Capturing) {
      emit("ERR UNEXPECTED_IMAGE");
      return r;
    }
    s.phase = Phase::Recognizing;
    std::optional<GateReading> reading;
    if (deps.recognize) reading = deps.recognize(path);
    if (!reading || !valid_plate_text(reading->text)) {
      s.phase = Phase::Rejected;
      s.deadline = tick + cfg.reject_cooldown_ms;
      emit("LCD " + std::string(kFailText));
      return r;
    }
    const ParkingRecord rec = record_entry(reading->text, reading->type, cfg.tariff, [&] { return clock_at(cfg, tick); });
    if (deps.append) deps.append(rec);
    std::uint64_t serial = 0;
    if (deps.printer) {
      const Receipt receipt = deps.printer->print(rec);
      serial = receipt.serial;
      if (deps.on_receipt) deps.on_receipt(receipt);
    }

    const std::int64_t day = tick / 86'400'000;
    if (day != s.day) s.daily_count = 0;
    s.day = day;
    ++s.daily_count;

    s.phase = Phase::BarrierOpen;
    s.deadline = tick + cfg.open_ms;
    emit("BARRIER OPEN " + std::to_string(cfg.open_ms));
    emit("LCD " + std::string(kPermitText));
    emit("SEG7 " + (cfg.seg7 == Seg7Mode::Amount ? format_money(rec.cost) : std::to_string(s.daily_count)));
    emit("RECEIPT " + std::to_string(serial));
    return r;
  }

  emit("ERR BAD_COMMAND");
  return r;
}

/// Owns the state, journal hook and receipt serials of one gate.
class GateSession {
 public:
  GateSession(GateConfig cfg, std::function<std::optional<GateReading>(const std::string&)> recognize,
              std::function<void(const ParkingRecord&)> append, std::uint64_t first_serial = 1)
      : cfg_(std::move(cfg)), printer_(first_serial) {
    deps_.recognize = std::move(recognize);
    deps_.append = std::move(append);
    deps_.printer = &printer_;
    deps_.on_receipt = [this](const Receipt& r) { receipts_.push_back(r); };
  }
  GateSession(const GateSession&) = delete;
  GateSession& operator=(const GateSession&) = delete;

  std::vector<GateEvent> handle(std::int64_t tick, std::string_view line) {
    StepResult r = step(state_, tick, line, cfg_, deps_);
    state_ = r.state;
    return std::move(r.out);
  }

  const GateState& state() const { return state_; }
  const GateConfig& config() const { return cfg_; }
  const std::vector<Receipt>& receipts() const { return receipts_; }

 private:
  GateConfig cfg_;
  ReceiptPrinter printer_;
  GateDeps deps_;
  GateState state_;
  std::vector<Receipt> receipts_;
};

struct ScenarioLine {
  std::int64_t tick = 0;
  std::string command;  // empty: time advance only
};

/// `<tick> [command]` per line; blank lines and `#` comments are skipped.
inline std::vector<ScenarioLine> parse_scenario(std::istream& in) {
  std::vector<ScenarioLine> out;
  std::string line;
  std::size_t n = 0;
  std::int64_t last = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::size_t end = line.find(' ', first);
    const std::string_view num = std::string_view(line).substr(first, end - first);
    std::int64_t tick = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), tick);
    if (ec != std::errc() || p != num.data() + num.size() || tick < 0)
      throw std::invalid_argument("scenario line " + std::to_string(n) + ": expected a tick number");
    if (tick < last) throw std::invalid_argument("scenario line " + std::to_string(n) + ": tick goes backwards");
    last = tick;
    out.push_back({tick, end == std::string::npos ? std::string() : line.substr(end + 1)});
  }
  return out;
}

inline std::string format_event(const GateEvent& e) { return std::to_string(e.tick) + " " + e.payload; }

/// Runs every scenario line and returns the outbound transcript.
inline std::vector<GateEvent> run_scenario(GateSession& session, const std::vector<ScenarioLine>& script) {
  std::vector<GateEvent> transcript;
  for (const auto& l : script)
    for (auto& e : session.handle(l.tick, l.command)) transcript.push_back(std::move(e));
  return transcript;
}

inline void write_transcript(std::ostream& os, const std::vector<GateEvent>& events) {
  for (const auto& e : events) os << format_event(e) << '\n';
}

}  // namespace vlpr::gate
