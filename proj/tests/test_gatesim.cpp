#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gate_script.hpp"
#include "vlpr/gatesim.hpp"

using namespace vlpr;
using namespace vlpr::gate;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> payloads(const std::vector<GateEvent>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) out.push_back(e.payload);
  return out;
}

GateDeps deps_with(std::optional<GateReading> reading, std::vector<ParkingRecord>* journal = nullptr,
                   ReceiptPrinter* printer = nullptr) {
  GateDeps d;
  d.recognize = [reading](const std::string&) { return reading; };
  if (journal) d.append = [journal](const ParkingRecord& r) { journal->push_back(r); };
  d.printer = printer;
  return d;
}

}  // namespace

TEST(Gate, AcceptedVehicleEmitsTheFullSequence) {
  std::vector<ParkingRecord> journal;
  ReceiptPrinter printer(9);
  const GateConfig cfg;
  const GateDeps deps = deps_with(GateReading{"12B34567", PlateType::Yellow}, &journal, &printer);
  StepResult r = step({}, 0, "SENSOR VEHICLE", cfg, deps);
  EXPECT_EQ(r.state.phase, Phase::Capturing);
  EXPECT_EQ(payloads(r.out), std::vector<std::string>{"CAPTURE"});
  r = step(r.state, 100, "IMAGE frame.bmp", cfg, deps);
  EXPECT_EQ(payloads(r.out), (std::vector<std::string>{"BARRIER OPEN 5000", "LCD You Have Permission to go",
                                                       "SEG7 2.00", "RECEIPT 9"}));
  EXPECT_EQ(r.state.phase, Phase::BarrierOpen);
  EXPECT_EQ(r.state.remaining_ms(), 5000);
  ASSERT_EQ(journal.size(), 1u);
  EXPECT_EQ(journal[0].cost, 200);
}

TEST(Gate, UnreadablePlateIsRejectedWithoutBarrier) {
  std::vector<ParkingRecord> journal;
  const GateConfig cfg;
  for (const auto& reading : {std::optional<GateReading>{}, std::optional<GateReading>{GateReading{"", PlateType::Red}}}) {
    const GateDeps deps = deps_with(reading, &journal);
    StepResult r = step({}, 0, "SENSOR VEHICLE", cfg, deps);
    r = step(r.state, 100, "IMAGE frame.bmp", cfg, deps);
    EXPECT_EQ(payloads(r.out), std::vector<std::string>{"LCD Recognition Failed"});
    EXPECT_EQ(r.state.phase, Phase::Rejected);
    EXPECT_EQ(advance(r.state, 100 + cfg.reject_cooldown_ms - 1).phase, Phase::Rejected);
    EXPECT_EQ(advance(r.state, 100 + cfg.reject_cooldown_ms).phase, Phase::Idle);
  }
  EXPECT_TRUE(journal.empty());
}

TEST(Gate, BarrierClosesAfterTheOpenDuration) {
  GateConfig cfg;
  cfg.open_ms = 3000;
  const GateDeps deps = deps_with(GateReading{"1", PlateType::White});
  StepResult r = step({}, 0, "SENSOR VEHICLE", cfg, deps);
  r = step(r.state, 10, "IMAGE a", cfg, deps);
  EXPECT_EQ(step(r.state, 3009, "", cfg, deps).state.phase, Phase::BarrierOpen);
  EXPECT_EQ(step(r.state, 3010, "", cfg, deps).state.phase, Phase::Idle);
}

TEST(Gate, ErrorsLeaveTheStateAlone) {
  const GateConfig cfg;
  const GateDeps deps = deps_with(GateReading{"1", PlateType::White});
  StepResult r = step({}, 0, "IMAGE early.bmp", cfg, deps);
  EXPECT_EQ(payloads(r.out), std::vector<std::string>{"ERR UNEXPECTED_IMAGE"});
  EXPECT_EQ(r.state.phase, Phase::Idle);
  EXPECT_EQ(payloads(step({}, 0, "HELLO", cfg, deps).out), std::vector<std::string>{"ERR BAD_COMMAND"});
  EXPECT_EQ(payloads(step({}, 0, "IMAGE ", cfg, deps).out), std::vector<std::string>{"ERR BAD_COMMAND"});

  r = step({}, 0, "SENSOR VEHICLE", cfg, deps);
  r = step(r.state, 10, "IMAGE a", cfg, deps);
  const GateState open = r.state;
  r = step(open, 20, "SENSOR VEHICLE", cfg, deps);
  EXPECT_EQ(payloads(r.out), std::vector<std::string>{"ERR BUSY"});
  EXPECT_EQ(r.state.phase, Phase::BarrierOpen);
  EXPECT_EQ(r.state.deadline, open.deadline);
  EXPECT_THROW(step(r.state, 5, "", cfg, deps), std::invalid_argument);
}

TEST(Gate, NoBarrierWithoutRecognitionInTheSameCycle) {
  const GateConfig cfg;
  std::mt19937_64 rng(601);
  const std::vector<std::string> inputs{"SENSOR VEHICLE", "IMAGE x", "", "JUNK"};
  for (int trial = 0; trial < 200; ++trial) {
    bool readable = rng() % 2;
    const GateDeps deps = deps_with(readable ? std::optional<GateReading>{GateReading{"7", PlateType::Red}} : std::nullopt);
    GateState s;
    bool recognized = false;
    std::int64_t tick = 0;
    for (int i = 0; i < 40; ++i) {
      tick += static_cast<std::int64_t>(rng() % 3000);
      const std::string& in = inputs[rng() % inputs.size()];
      const Phase before = advance(s, tick).phase;
      StepResult r = step(s, tick, in, cfg, deps);
      for (const auto& p : payloads(r.out))
        if (p.rfind("BARRIER OPEN", 0) == 0) {
          EXPECT_EQ(before, Phase::Capturing);
          EXPECT_TRUE(readable);
          recognized = true;
        }
      s = r.state;
    }
    if (!readable) {
      EXPECT_FALSE(recognized);
    }
  }
}

TEST(Gate, DailyCountModeResetsAtMidnight) {
  GateConfig cfg;
  cfg.seg7 = Seg7Mode::DailyCount;
  cfg.open_ms = 1000;
  GateSession session(cfg, [](const std::string&) { return GateReading{"1", PlateType::White}; }, nullptr);
  std::vector<std::string> seg;
  for (std::int64_t t : {0LL, 10'000LL, 20'000LL, 86'400'000LL})
    for (const auto& e : run_scenario(session, {{t, "SENSOR VEHICLE"}, {t + 10, "IMAGE f"}}))
      if (e.payload.rfind("SEG7", 0) == 0) seg.push_back(e.payload);
  EXPECT_EQ(seg, (std::vector<std::string>{"SEG7 1", "SEG7 2", "SEG7 3", "SEG7 1"}));
}

TEST(Scenario, ParsesTicksAndCommands) {
  std::istringstream in("# comment\n\n0 SENSOR VEHICLE\n150 IMAGE a b.bmp\r\n900\n");
  const auto s = parse_scenario(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1].tick, 150);
  EXPECT_EQ(s[1].command, "IMAGE a b.bmp");
  EXPECT_EQ(s[2].command, "");
  std::istringstream back("10 X\n5 Y\n"), junk("abc SENSOR VEHICLE\n");
  EXPECT_THROW(parse_scenario(back), std::invalid_argument);
  EXPECT_THROW(parse_scenario(junk), std::invalid_argument);
}

TEST(Scenario, TwentyVehiclesMatchTheGoldenTranscript) {
  const gate_script::Run run = gate_script::run();
  EXPECT_EQ(run.transcript, slurp(std::filesystem::path(VLPR_SOURCE_DIR) / "tests/golden/gate_transcript.txt"));
  ASSERT_EQ(run.journal.size(), 15u);
  ASSERT_EQ(run.receipts.size(), 15u);
  Cents revenue = 0;
  for (std::size_t i = 0; i < run.journal.size(); ++i) {
    revenue += run.journal[i].cost;
    EXPECT_EQ(run.receipts[i].record, run.journal[i]);
    EXPECT_EQ(run.receipts[i].serial, i + 1);
  }
  EXPECT_EQ(revenue, 5 * (0 + 200 + 100));
  EXPECT_EQ(format_timestamp(run.journal[1].timestamp), "2024-03-05T08:00:10Z");
}

TEST(Scenario, ReplayIsBitIdentical) {
  EXPECT_EQ(gate_script::run().transcript, gate_script::run().transcript);
}

TEST(Scenario, TranscriptLinesFollowTheGrammar) {
  const std::string t = gate_script::run().transcript;
  std::istringstream in(t);
  std::string line;
  while (std::getline(in, line)) {
    const std::string payload = line.substr(line.find(' ') + 1);
    const bool ok = payload == "CAPTURE" || payload.rfind("BARRIER OPEN ", 0) == 0 || payload.rfind("LCD ", 0) == 0 ||
                    payload.rfind("SEG7 ", 0) == 0 || payload.rfind("RECEIPT ", 0) == 0 || payload.rfind("ERR ", 0) == 0;
    EXPECT_TRUE(ok) << line;
  }
}
