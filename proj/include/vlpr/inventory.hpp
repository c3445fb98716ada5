#pragma once

// Parking records, tariff, append-only journal, receipts and revenue reports.
// Money is held as integer minor units (cents) throughout.

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vlpr/pipeline.hpp"
#include "vlpr/platetype.hpp"

namespace vlpr {

using Timestamp = std::chrono::sys_seconds;
using Cents = std::int64_t;
using Clock = std::function<Timestamp()>;

class RejectedReading : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class JournalCorrupt : public std::runtime_error {
 public:
  JournalCorrupt(std::size_t line, const std::string& why)
      : std::runtime_error("journal line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InvalidRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Text forms

inline std::string format_money(Cents c) {
  if (c < 0) throw std::invalid_argument("negative amount");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(c / 100), static_cast<long long>(c % 100));
  return buf;
}

/// Accepts `<digits>.<2 digits>` or bare digits.
inline std::optional<Cents> parse_money(std::string_view s) {
  const std::size_t dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  if (whole.empty() || whole.size() > 15) return std::nullopt;
  Cents units = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
  if (ec != std::errc() || p != whole.data() + whole.size() || whole.front() == '-' || whole.front() == '+')
    return std::nullopt;
  Cents frac = 0;
  if (dot != std::string_view::npos) {
    const std::string_view f = s.substr(dot + 1);
    if (f.size() != 2 || f[0] < '0' || f[0] > '9' || f[1] < '0' || f[1] > '9') return std::nullopt;
    frac = (f[0] - '0') * 10 + (f[1] - '0');
  }
  return units * 100 + frac;
}

/// `YYYY-MM-DDTHH:MM:SSZ`
inline std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

namespace detail {

inline std::optional<int> digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

inline std::optional<std::chrono::sys_days> parse_date(std::string_view s) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto y = digits(s, 0, 4), m = digits(s, 5, 2), d = digits(s, 8, 2);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd};
}

}  // namespace detail

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() != 20 || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z') return std::nullopt;
  const auto day = detail::parse_date(s);
  const auto h = detail::digits(s, 11, 2), mi = detail::digits(s, 14, 2), sec = detail::digits(s, 17, 2);
  if (!day || !h || !mi || !sec || *h > 23 || *mi > 59 || *sec > 59) return std::nullopt;
  return Timestamp{*day} + std::chrono::hours{*h} + std::chrono::minutes{*mi} + std::chrono::seconds{*sec};
}

/// Range bound from `YYYY-MM-DD` or a full timestamp. A bare date used as an end
/// bound covers the whole day.
inline std::optional<Timestamp> parse_range_bound(std::string_view s, bool end) {
  if (s.size() == 10) {
    const auto day = detail::parse_date(s);
    if (!day) return std::nullopt;
    return end ? Timestamp{*day} + std::chrono::hours{24} - std::chrono::seconds{1} : Timestamp{*day};
  }
  return parse_timestamp(s);
}

inline bool valid_plate_text(std::string_view s) {
  return !s.empty() && s.find_first_of("|\r\n") == std::string_view::npos;
}

// ---------------------------------------------------------------------------
// Records

struct Tariff {
  std::array<Cents, 3> cost{0, 200, 100};  // indexed by PlateType: Red, Yellow, White

  Cents operator[](PlateType t) const { return cost[static_cast<std::size_t>(t)]; }
  Cents& operator[](PlateType t) { return cost[static_cast<std::size_t>(t)]; }

  void validate() const {
    for (Cents c : cost)
      if (c < 0) throw std::invalid_argument("tariff costs must be non-negative");
  }
};

struct ParkingRecord {
  std::string plate_text;
  PlateType plate_type = PlateType::White;
  Timestamp timestamp{};
  Cents cost = 0;

  friend bool operator==(const ParkingRecord&, const ParkingRecord&) = default;
};

inline ParkingRecord record_entry(const std::string& plate_text, PlateType type, const Tariff& tariff,
                                  const Clock& clock) {
  if (plate_text.empty()) throw RejectedReading("reading has no text");
  if (!valid_plate_text(plate_text)) throw RejectedReading("plate text contains a separator");
  tariff.validate();
  return {plate_text, type, clock(), tariff[type]};
}

inline ParkingRecord record_entry(const PlateReading& reading, const Tariff& tariff, const Clock& clock) {
  return record_entry(reading.text, reading.plate_type, tariff, clock);
}

inline constexpr std::string_view kJournalVersion = "v1";

inline std::string encode_record(const ParkingRecord& r) {
  if (!valid_plate_text(r.plate_text)) throw std::invalid_argument("plate text cannot be journaled");
  std::string s(kJournalVersion);
  s += '|';
  s += format_timestamp(r.timestamp);
  s += '|';
  s += r.plate_text;
  s += '|';
  s += to_string(r.plate_type);
  s += '|';
  s += format_money(r.cost);
  return s;
}

inline ParkingRecord decode_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  for (;;) {
    const std::size_t bar = line.find('|', start);
    f.push_back(line.substr(start, bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (f.size() != 5) throw JournalCorrupt(line_no, "expected 5 fields, found " + std::to_string(f.size()));
  if (f[0] != kJournalVersion) throw JournalCorrupt(line_no, "unknown record version '" + std::string(f[0]) + "'");
  ParkingRecord r;
  const auto ts = parse_timestamp(f[1]);
  if (!ts) throw JournalCorrupt(line_no, "bad timestamp '" + std::string(f[1]) + "'");
  r.timestamp = *ts;
  if (f[2].empty()) throw JournalCorrupt(line_no, "empty plate text");
  r.plate_text = std::string(f[2]);
  const auto type = parse_plate_type(std::string(f[3]));
  if (!type) throw JournalCorrupt(line_no, "bad plate type '" + std::string(f[3]) + "'");
  r.plate_type = *type;
  const auto cost = parse_money(f[4]);
  if (!cost || f[4].find('.') == std::string_view::npos) throw JournalCorrupt(line_no, "bad amount '" + std::string(f[4]) + "'");
  r.cost = *cost;
  return r;
}

inline std::vector<ParkingRecord> read_records(std::istream& in) {
  std::vector<ParkingRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    out.push_back(decode_record(line, n));
  }
  return out;
}

/// Single-writer, append-only journal file.
class Journal {
 public:
  explicit Journal(std::string path) : path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  void append(const ParkingRecord& r) const {
    const std::string line = encode_record(r) + '\n';
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open journal " + path_);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write journal " + path_);
  }

  /// Missing file reads as an empty journal.
  std::vector<ParkingRecord> read_all() const {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return {};
    return read_records(in);
  }

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// Receipts

struct Receipt {
  ParkingRecord record;
  std::uint64_t serial = 0;
  std::string rendered;
};

inline Receipt render_receipt(const ParkingRecord& r, std::uint64_t serial) {
  char num[32];
  std::snprintf(num, sizeof num, "%06llu", static_cast<unsigned long long>(serial));
  std::string s;
  s += "PARKING ENTRANCE RECEIPT\n";
  s += "Serial: " + std::string(num) + "\n";
  s += "Plate:  " + r.plate_text + "\n";
  s += "Type:   " + to_string(r.plate_type) + "\n";
  s += "Time:   " + format_timestamp(r.timestamp) + "\n";
  s += "Amount: " + format_money(r.cost) + "\n";
  return {r, serial, s};
}

/// Hands out receipt serials for one service instance.
class ReceiptPrinter {
 public:
  explicit ReceiptPrinter(std::uint64_t first = 1) : next_(first) {}
  Receipt print(const ParkingRecord& r) { return render_receipt(r, next_++); }
  std::uint64_t next_serial() const { return next_; }

 private:
  std::uint64_t next_;
};

// ---------------------------------------------------------------------------
// Reports

struct TypeSummary {
  PlateType type = PlateType::White;
  std::size_t count = 0;
  Cents revenue = 0;
};

struct InventoryReport {
  Timestamp from{};
  Timestamp to{};
  std::vector<TypeSummary> rows;  // types with at least one record, Red, Yellow, White order
  std::size_t total_count = 0;
  Cents total_revenue = 0;
};

/// Records with from <= timestamp <= to.
inline InventoryReport report(const std::vector<ParkingRecord>& records, Timestamp from, Timestamp to) {
  if (to < from) throw InvalidRange("report range ends before it starts");
  InventoryReport r;
  r.from = from;
  r.to = to;
  std::array<TypeSummary, 3> acc{TypeSummary{PlateType::Red}, TypeSummary{PlateType::Yellow},
                                 TypeSummary{PlateType::White}};
  for (const auto& rec : records) {
    if (rec.timestamp < from || rec.timestamp > to) continue;
    TypeSummary& t = acc[static_cast<std::size_t>(rec.plate_type)];
    ++t.count;
    t.revenue += rec.cost;
  }
  for (const auto& t : acc) {
    if (t.count == 0) continue;
    r.rows.push_back(t);
    r.total_count += t.count;
    r.total_revenue += t.revenue;
  }
  return r;
}

inline void print_inventory_report(std::ostream& os, const InventoryReport& r) {
  os << "From: " << format_timestamp(r.from) << '\n' << "To:   " << format_timestamp(r.to) << '\n';
  os << std::left << std::setw(10) << "Type" << std::right << std::setw(8) << "Count" << std::setw(14) << "Revenue"
     << '\n';
  for (const auto& t : r.rows)
    os << std::left << std::setw(10) << to_string(t.type) << std::right << std::setw(8) << t.count << std::setw(14)
       << format_money(t.revenue) << '\n';
  os << std::left << std::setw(10) << "Total" << std::right << std::setw(8) << r.total_count << std::setw(14)
     << format_money(r.total_revenue) << '\n';
}

}  // namespace vlpr
