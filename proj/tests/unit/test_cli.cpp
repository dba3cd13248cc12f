#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fairbayes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = fairbayes::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kSmall{"--reps", "2", "--n-train", "1500", "--n-test", "500",
                                      "--set", "train.epochs=40", "--threads", "1"};

std::vector<std::string> with_small(std::vector<std::string> head) {
  head.insert(head.end(), kSmall.begin(), kSmall.end());
  return head;
}

}  // namespace

TEST(Cli, SynthCsvIsByteIdenticalAcrossRuns) {
  const auto a = invoke(with_small({"synth", "--delta", "0,0.1", "--format", "csv"}));
  const auto b = invoke(with_small({"synth", "--delta", "0,0.1", "--format", "csv"}));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# synth.summary", 0), 0u);
}

TEST(Cli, JsonReportParses) {
  const auto r = invoke(with_small({"synth", "--measure", "eo", "--delta", "0.04", "--format", "json"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "synth");
  EXPECT_EQ(j["tables"]["summary"]["rows"].size(), 1u);
}

TEST(Cli, UsageErrorsExitTwoWithJson) {
  const auto r = invoke({"synth", "--measure", "xx"});
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["kind"], "usage");
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
}

TEST(Cli, RunFailureExitsOne) {
  const auto r = invoke({"tabular", "--data", "/nonexistent/x.csv", "--schema", "/nonexistent/x.schema"});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_TRUE(j["error"].contains("message"));
  EXPECT_EQ(j["error"]["command"], "tabular");
}

TEST(Cli, InvalidConfigValueExitsNonZero) {
  const auto r = invoke({"synth", "--delta", "-0.1", "--reps", "1"});
  EXPECT_NE(r.code, 0);
  EXPECT_NO_THROW(nlohmann::json::parse(r.err));
}

TEST(Cli, DumpConfigRoundTripsThroughConfigFile) {
  const auto dump = invoke({"synth", "--delta", "0.2", "--seed", "9", "--dump-config"});
  ASSERT_EQ(dump.code, 0) << dump.err;
  const fs::path cfg = fs::temp_directory_path() / "fairbayes_cli_dump.conf";
  std::ofstream(cfg) << dump.out;
  const auto again = invoke({"synth", "--config", cfg.string(), "--dump-config"});
  fs::remove(cfg);
  EXPECT_EQ(again.out, dump.out);
}

TEST(Cli, TradeoffStatsReportOneFit) {
  const auto r = invoke(with_small({"tradeoff", "--grid-points", "50", "--stats", "--format", "csv"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["stats"]["fits"], 1);
}

TEST(Cli, GenerateThenTabular) {
  const fs::path dir = fs::temp_directory_path() / "fairbayes_cli_generate";
  fs::create_directories(dir);
  const auto gen = invoke({"generate", "--n", "2000", "--seed", "3", "--out", (dir / "s.csv").string(), "--schema-out",
                           (dir / "s.schema").string(), "--population-out", (dir / "s.population").string()});
  ASSERT_EQ(gen.code, 0) << gen.err;
  const auto tab = invoke({"tabular", "--data", (dir / "s.csv").string(), "--schema", (dir / "s.schema").string(),
                           "--reps", "2", "--set", "train.epochs=40", "--threads", "1", "--out",
                           (dir / "report.csv").string(), "--format", "csv"});
  ASSERT_EQ(tab.code, 0) << tab.err;
  const std::string report = slurp(dir / "report.csv");
  fs::remove_all(dir);
  EXPECT_EQ(report.rfind("# tabular.summary", 0), 0u);
  EXPECT_FALSE(tab.out.empty());
}
