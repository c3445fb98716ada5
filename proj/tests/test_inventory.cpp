#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "vlpr/inventory.hpp"

using namespace vlpr;
using namespace std::chrono;

namespace {

Timestamp at(int y, unsigned m, unsigned d, int hh = 0, int mm = 0, int ss = 0) {
  return Timestamp{sys_days{year{y} / month{m} / day{d}}} + hours{hh} + minutes{mm} + seconds{ss};
}

Clock fixed(Timestamp t) {
  return [t] { return t; };
}

std::filesystem::path scratch_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vlpr_inventory_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ParkingRecord random_record(std::mt19937_64& rng) {
  static const std::string chars = "0123456789ABCDEFGHJKLMNPRSTUVWXYZ";
  ParkingRecord r;
  const int len = 1 + static_cast<int>(rng() % 10);
  for (int i = 0; i < len; ++i) r.plate_text += chars[rng() % chars.size()];
  r.plate_type = static_cast<PlateType>(rng() % 3);
  // 0001-01-01 .. 9999-12-31
  const std::int64_t lo = duration_cast<seconds>(at(1, 1, 1).time_since_epoch()).count();
  const std::int64_t hi = duration_cast<seconds>(at(9999, 12, 31, 23, 59, 59).time_since_epoch()).count();
  r.timestamp = Timestamp{seconds{lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1))}};
  r.cost = static_cast<Cents>(rng() % 100'000'000'000ULL);
  return r;
}

}  // namespace

TEST(Money, FormatsTwoDecimals) {
  EXPECT_EQ(format_money(0), "0.00");
  EXPECT_EQ(format_money(5), "0.05");
  EXPECT_EQ(format_money(200), "2.00");
  EXPECT_EQ(format_money(123456), "1234.56");
  EXPECT_THROW(format_money(-1), std::invalid_argument);
}

TEST(Money, ParsesStrictly) {
  EXPECT_EQ(parse_money("2.00"), 200);
  EXPECT_EQ(parse_money("0.07"), 7);
  EXPECT_EQ(parse_money("3"), 300);
  for (const char* bad : {"", "-1.00", "+1.00", "1.0", "1.000", "1.a0", ".50", "1,00", "12345678901234567.00"})
    EXPECT_FALSE(parse_money(bad)) << bad;
}

TEST(Timestamp, KnownInstants) {
  EXPECT_EQ(format_timestamp(Timestamp{seconds{0}}), "1970-01-01T00:00:00Z");
  EXPECT_EQ(format_timestamp(Timestamp{seconds{951782400}}), "2000-02-29T00:00:00Z");
  EXPECT_EQ(format_timestamp(Timestamp{seconds{4102444799}}), "2099-12-31T23:59:59Z");
  EXPECT_EQ(parse_timestamp("2000-02-29T00:00:00Z"), Timestamp{seconds{951782400}});
}

TEST(Timestamp, RejectsMalformed) {
  for (const char* bad : {"2001-02-29T00:00:00Z", "2024-13-01T00:00:00Z", "2024-01-01T24:00:00Z",
                          "2024-01-01 00:00:00Z", "2024-01-01T00:00:00", "2024-1-01T00:00:00Z"})
    EXPECT_FALSE(parse_timestamp(bad)) << bad;
}

TEST(Timestamp, RangeBoundsCoverWholeDays) {
  EXPECT_EQ(parse_range_bound("2024-03-05", false), at(2024, 3, 5));
  EXPECT_EQ(parse_range_bound("2024-03-05", true), at(2024, 3, 5, 23, 59, 59));
  EXPECT_EQ(parse_range_bound("2024-03-05T01:02:03Z", true), at(2024, 3, 5, 1, 2, 3));
  EXPECT_FALSE(parse_range_bound("yesterday", false));
}

TEST(RecordEntry, ChargesTheTariffOfTheType) {
  Tariff t;
  t[PlateType::Yellow] = 200;
  const ParkingRecord r = record_entry("12B34567", PlateType::Yellow, t, fixed(at(2024, 1, 1)));
  EXPECT_EQ(r.cost, 200);
  EXPECT_EQ(r.timestamp, at(2024, 1, 1));
  EXPECT_EQ(record_entry("12B34567", PlateType::Red, t, fixed(at(2024, 1, 1))).cost, 0);
}

TEST(RecordEntry, DefaultTariffIsTheShippedOne) {
  const Tariff t;
  EXPECT_EQ(t[PlateType::White], 100);
  EXPECT_EQ(t[PlateType::Yellow], 200);
  EXPECT_EQ(t[PlateType::Red], 0);
}

TEST(RecordEntry, ReEntryGivesDistinctRecords) {
  const Tariff t;
  const auto a = record_entry("77C12345", PlateType::White, t, fixed(at(2024, 1, 1, 8)));
  const auto b = record_entry("77C12345", PlateType::White, t, fixed(at(2024, 1, 1, 9)));
  EXPECT_NE(a, b);
  EXPECT_EQ(a, record_entry("77C12345", PlateType::White, t, fixed(at(2024, 1, 1, 8))));
}

TEST(RecordEntry, RejectsUnusableReadings) {
  const Tariff t;
  EXPECT_THROW(record_entry("", PlateType::White, t, fixed({})), RejectedReading);
  EXPECT_THROW(record_entry("AB|C", PlateType::White, t, fixed({})), RejectedReading);
  PlateReading empty;
  EXPECT_THROW(record_entry(empty, t, fixed({})), RejectedReading);
  Tariff negative;
  negative[PlateType::Red] = -5;
  EXPECT_THROW(record_entry("1", PlateType::White, negative, fixed({})), std::invalid_argument);
}

TEST(Journal, LineFormatIsExact) {
  const ParkingRecord r{"12B34567", PlateType::Yellow, at(2024, 3, 5, 8, 9, 10), 200};
  EXPECT_EQ(encode_record(r), "v1|2024-03-05T08:09:10Z|12B34567|Yellow|2.00");
  const auto path = scratch_file("format.journal");
  Journal(path.string()).append(r);
  EXPECT_EQ(slurp(path), "v1|2024-03-05T08:09:10Z|12B34567|Yellow|2.00\n");
}

TEST(Journal, MissingFileIsEmpty) {
  EXPECT_TRUE(Journal(scratch_file("none.journal").string()).read_all().empty());
}

TEST(Journal, AppendsReadBackInOrder) {
  const Journal j(scratch_file("order.journal").string());
  std::vector<ParkingRecord> want;
  for (int i = 0; i < 3; ++i) {
    want.push_back({"P" + std::to_string(i), static_cast<PlateType>(i), at(2024, 5, 1, i), i * 100});
    j.append(want.back());
  }
  EXPECT_EQ(j.read_all(), want);
}

TEST(Journal, FuzzRoundTripTenThousandRecords) {
  std::mt19937_64 rng(501);
  const Journal j(scratch_file("fuzz.journal").string());
  std::vector<ParkingRecord> want;
  for (int i = 0; i < 10'000; ++i) {
    want.push_back(random_record(rng));
    j.append(want.back());
  }
  const auto got = j.read_all();
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    ASSERT_EQ(got[i].plate_text, want[i].plate_text) << i;
    ASSERT_EQ(got[i].plate_type, want[i].plate_type) << i;
    ASSERT_EQ(got[i].timestamp, want[i].timestamp) << i;
    ASSERT_EQ(got[i].cost, want[i].cost) << i;
  }
}

TEST(Journal, CorruptLineReportsItsNumber) {
  const auto path = scratch_file("corrupt.journal");
  {
    std::ofstream out(path);
    out << "v1|2024-03-05T08:09:10Z|12B34567|Yellow|2.00\n";
    out << "v1|2024-03-05T08:09:10Z|12B34567|Blue|2.00\n";
  }
  try {
    Journal(path.string()).read_all();
    FAIL() << "expected JournalCorrupt";
  } catch (const JournalCorrupt& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  for (const char* bad : {"v2|2024-03-05T08:09:10Z|A|Red|0.00", "v1|2024-03-05T08:09:10Z|A|Red|0",
                          "v1|2024-03-05T08:09:10Z||Red|0.00", "v1|2024-03-05|A|Red|0.00", "v1|x"})
    EXPECT_THROW(decode_record(bad, 1), JournalCorrupt) << bad;
}

TEST(Receipt, MatchesGoldenFile) {
  const ParkingRecord r{"12B34567", PlateType::Yellow, at(2024, 3, 5, 8, 9, 10), 200};
  EXPECT_EQ(render_receipt(r, 42).rendered, slurp(std::filesystem::path(VLPR_SOURCE_DIR) / "tests/golden/receipt.txt"));
}

TEST(Receipt, CarriesEveryFieldAndSerialsIncrease) {
  ReceiptPrinter printer(7);
  std::mt19937_64 rng(503);
  std::uint64_t last = 0;
  for (int i = 0; i < 50; ++i) {
    const ParkingRecord r = random_record(rng);
    const Receipt rc = printer.print(r);
    if (i > 0) {
      EXPECT_EQ(rc.serial, last + 1);
    }
    last = rc.serial;
    EXPECT_NE(rc.rendered.find(r.plate_text), std::string::npos);
    EXPECT_NE(rc.rendered.find(to_string(r.plate_type)), std::string::npos);
    EXPECT_NE(rc.rendered.find(format_timestamp(r.timestamp)), std::string::npos);
    EXPECT_NE(rc.rendered.find(format_money(r.cost)), std::string::npos);
    EXPECT_EQ(rc.rendered.find('\r'), std::string::npos);
  }
  EXPECT_EQ(printer.next_serial(), 57u);
}

TEST(Report, SelectsTheRange) {
  std::vector<ParkingRecord> rs;
  for (int d = 1; d <= 5; ++d) rs.push_back({"A", PlateType::White, at(2024, 1, static_cast<unsigned>(d)), 100});
  const auto r = report(rs, at(2024, 1, 2), at(2024, 1, 4));
  EXPECT_EQ(r.total_count, 3u);
  EXPECT_EQ(r.total_revenue, 300);
  EXPECT_TRUE(report(rs, at(2030, 1, 1), at(2030, 1, 2)).rows.empty());
  EXPECT_THROW(report(rs, at(2024, 1, 4), at(2024, 1, 2)), InvalidRange);
}

TEST(Report, AgreesWithBruteForceTally) {
  std::mt19937_64 rng(505);
  std::vector<ParkingRecord> rs;
  for (int i = 0; i < 3000; ++i) rs.push_back(random_record(rng));
  for (int trial = 0; trial < 20; ++trial) {
    Timestamp a = random_record(rng).timestamp, b = random_record(rng).timestamp;
    if (b < a) std::swap(a, b);
    std::array<std::size_t, 3> count{};
    std::array<Cents, 3> money{};
    for (const auto& r : rs)
      if (a <= r.timestamp && r.timestamp <= b) {
        ++count[static_cast<std::size_t>(r.plate_type)];
        money[static_cast<std::size_t>(r.plate_type)] += r.cost;
      }
    const auto rep = report(rs, a, b);
    std::size_t total = 0;
    Cents revenue = 0;
    for (const auto& row : rep.rows) {
      EXPECT_EQ(row.count, count[static_cast<std::size_t>(row.type)]);
      EXPECT_EQ(row.revenue, money[static_cast<std::size_t>(row.type)]);
      total += row.count;
      revenue += row.revenue;
    }
    EXPECT_EQ(rep.total_count, total);
    EXPECT_EQ(rep.total_revenue, revenue);
    EXPECT_EQ(total, count[0] + count[1] + count[2]);
  }
}

TEST(Report, PrintsTotals) {
  const std::vector<ParkingRecord> rs{{"A", PlateType::Red, at(2024, 1, 1), 0},
                                      {"B", PlateType::Yellow, at(2024, 1, 1), 250}};
  std::ostringstream os;
  print_inventory_report(os, report(rs, at(2024, 1, 1), at(2024, 1, 1, 23, 59, 59)));
  EXPECT_NE(os.str().find("Yellow"), std::string::npos);
  EXPECT_NE(os.str().find("2.50"), std::string::npos);
  EXPECT_EQ(os.str().find("White"), std::string::npos);
}
