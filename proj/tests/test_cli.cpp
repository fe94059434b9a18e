#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wps/cli.hpp"

using namespace wps;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wps_test_" + std::to_string(::getpid()) + "_" + name);
}

double value_named(const nlohmann::json& report, const std::string& name) {
  for (const auto& v : report.at("values"))
    if (v.at("name") == name) return v.at("value").get<double>();
  ADD_FAILURE() << "no value " << name;
  return 0.0;
}

class SeedEnv {
 public:
  explicit SeedEnv(const char* value) { ::setenv("WPS_SEED", value, 1); }
  ~SeedEnv() { ::unsetenv("WPS_SEED"); }
};

}  // namespace

TEST(Cli, VerifyPassesWithDefaults) {
  const auto r = run({"verify"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_GE(j.at("checks").size(), 10u);
  for (const auto& c : j.at("checks")) EXPECT_TRUE(c.at("pass").get<bool>()) << c.at("name");
}

TEST(Cli, ScanVisibility) {
  const auto r = run({"scan", "--param", "phase", "--topology", "two-path", "--epsilon", "0.04"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "param,value,p_exit_i,p_exit_ii,visibility");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const auto last = line.rfind(',');
    EXPECT_NEAR(std::stod(line.substr(last + 1)), 0.92, 1e-9) << line;
  }
  EXPECT_GE(rows, 8);

  const auto eps = run({"scan", "--param", "epsilon", "--points", "9"});
  ASSERT_EQ(eps.code, 0) << eps.err;
  EXPECT_EQ(std::count(eps.out.begin(), eps.out.end(), '\n'), 10);
  EXPECT_EQ(run({"scan", "--points", "4"}).code, 2);
  EXPECT_EQ(run({"scan", "--topology", "three-path"}).code, 2);
}

TEST(Cli, AnalyzeUdOnDetectorD) {
  const auto r = run({"analyze", "--topology", "three-path", "--epsilon", "0.04", "--measurement", "ud", "--condition",
                      "detectorD"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* name : {"p_bob_A", "p_bob_B", "p_bob_C"}) EXPECT_NEAR(value_named(j, name), 0.12 / 1.24, 1e-12);
  EXPECT_NEAR(value_named(j, "p_bob_0"), 0.88 / 1.24, 1e-12);
  EXPECT_NE(r.out.find("0.0967741935483871"), std::string::npos);
  EXPECT_NE(r.out.find("0.709677419354839"), std::string::npos);
  for (const auto& v : j.at("values")) {
    EXPECT_FALSE(v.at("tag").get<std::string>().empty());
    EXPECT_TRUE(v.at("pass").get<bool>());
  }
}

TEST(Cli, UsageAndParseErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"analyze", "--epsilon", "0.5"}).code, 2);
  EXPECT_EQ(run({"analyze", "--epsilon", "abc"}).code, 2);
  EXPECT_EQ(run({"analyze", "--format", "yaml"}).code, 2);
  EXPECT_EQ(run({"analyze", "--scenario", "/nonexistent/wps.json"}).code, 2);
  EXPECT_EQ(run({"bet"}).code, 2);
  EXPECT_EQ(run({"optics"}).code, 2);
  const auto bad = run({"analyze", "--epsilon", "0.5"});
  EXPECT_NE(bad.err.find("1/3"), std::string::npos) << bad.err;
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ParseErrorReportsPosition) {
  const auto path = temp_file("broken.json");
  std::ofstream(path) << "{\n  \"topology\": \"three-path\",\n  \"epsilon\": ,\n}\n";
  const auto r = run({"analyze", "--scenario", path.string()});
  std::filesystem::remove(path);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, FlagsOverrideFileOverridesEnv) {
  const auto path = temp_file("scenario.json");
  std::ofstream(path) << R"({"topology": "two-path", "epsilon": 0.1, "seed": 5})";
  SeedEnv env("77");
  auto echo = [](const CliRun& r) { return nlohmann::json::parse(r.out).at("scenario"); };
  const auto from_file = echo(run({"analyze", "--scenario", path.string()}));
  EXPECT_EQ(from_file.at("topology"), "two-path");
  EXPECT_EQ(from_file.at("epsilon").get<double>(), 0.1);
  EXPECT_EQ(from_file.at("seed").get<std::uint64_t>(), 5u);
  const auto flagged = echo(run({"analyze", "--scenario", path.string(), "--epsilon", "0.2", "--seed", "9"}));
  EXPECT_EQ(flagged.at("epsilon").get<double>(), 0.2);
  EXPECT_EQ(flagged.at("seed").get<std::uint64_t>(), 9u);
  std::filesystem::remove(path);

  const auto from_env = echo(run({"analyze"}));
  EXPECT_EQ(from_env.at("seed").get<std::uint64_t>(), 77u);
  EXPECT_EQ(from_env.at("topology"), "three-path");
  EXPECT_EQ(from_env.at("epsilon").get<double>(), 0.04);
}

TEST(Cli, BadSeedEnvironment) {
  SeedEnv env("12x");
  EXPECT_EQ(run({"analyze"}).code, 2);
}

TEST(Cli, SeedFromEnvironmentDrivesSimulation) {
  const std::vector<std::string> args = {"simulate", "--measurement", "ud", "--trials", "20000"};
  std::string a, b;
  {
    SeedEnv env("123");
    a = run(args).out;
  }
  {
    SeedEnv env("124");
    b = run(args).out;
  }
  const std::string c = run({"simulate", "--measurement", "ud", "--trials", "20000", "--seed", "123"}).out;
  EXPECT_EQ(a, c);
  EXPECT_NE(a, b);
}

TEST(Cli, ByteIdenticalRepeatsAndJsonRoundTrip) {
  const std::vector<std::string> args = {"bet", "--measurement", "ud", "--trials", "50000", "--seed", "42"};
  const auto first = run(args);
  const auto second = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
  const auto j = nlohmann::json::parse(first.out);
  EXPECT_EQ(j.at("betting").at("wins"), j.at("betting").at("bets"));
  EXPECT_EQ(j.at("betting").at("winRate").get<double>(), 1.0);
  const auto ordered = nlohmann::ordered_json::parse(first.out);
  EXPECT_EQ(report::dump_json(ordered), first.out);
}

TEST(Cli, SimulateReportsPassingZScores) {
  const auto r = run({"simulate", "--measurement", "exit-orthogonal", "--trials", "100000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("monteCarlo").at("n").get<std::uint64_t>(), 100000u);
  for (const auto& e : j.at("monteCarlo").at("entries")) EXPECT_TRUE(e.at("pass").get<bool>()) << e.at("label");
}

TEST(Cli, OutFileAndFormats) {
  const auto path = temp_file("report.json");
  const auto r = run({"analyze", "--measurement", "ud", "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), run({"analyze", "--measurement", "ud"}).out);
  std::filesystem::remove(path);

  const auto csv = run({"analyze", "--measurement", "ud", "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("section,name,value,reference,tag,pass\n", 0), 0u);
  EXPECT_NE(csv.out.find("value,p_bob_A,0.0967741935483871,"), std::string::npos) << csv.out;

  const auto text = run({"verify", "--format", "text"});
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("result: pass"), std::string::npos);
}

TEST(Cli, OpticsBuiltinsAndMismatch) {
  for (const char* name : {"fig11-mud", "fig12-mem", "fig15-mud3", "fig15-mem3", "fig16-orthogonal"}) {
    const auto r = run({"optics", "--setup", name, "--epsilon", "0.1"});
    EXPECT_EQ(r.code, 0) << name << r.err;
  }
  EXPECT_EQ(run({"optics", "--setup", "fig99"}).code, 2);

  // The unambiguous-discrimination layout with a wrong plate angle compiles but fails the comparison.
  const auto path = temp_file("optics.json");
  std::ofstream(path) << R"({"topology": "two-path", "epsilon": 0.1, "opticalSetup": {
    "paths": 3, "compareTo": "fig11-mud",
    "inputs": [{"path": 0, "pol": "V"}, {"path": 0, "pol": "H"}],
    "elements": [{"type": "pbs", "p": 0, "q": 1},
                 {"type": "hwp", "path": 0, "thetaDegrees": 45},
                 {"type": "hwp", "path": 1, "thetaDegrees": 10},
                 {"type": "pbs", "p": 1, "q": 2},
                 {"type": "detector", "path": 1, "pol": "H", "label": "0"},
                 {"type": "sbs", "p": 0, "q": 2},
                 {"type": "detector", "path": 0, "label": "A"},
                 {"type": "detector", "path": 2, "label": "B"}]}})";
  const auto r = run({"optics", "--scenario", path.string()});
  std::filesystem::remove(path);
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_FALSE(nlohmann::json::parse(r.out).at("pass").get<bool>());
}

TEST(Cli, GoldenReports) {
  const std::filesystem::path dir = std::filesystem::path(WPS_SOURCE_DIR) / "tests" / "golden";
  for (const std::string e : {"0.01", "0.04", "0.1"}) {
    const auto ud = run({"analyze", "--topology", "three-path", "--epsilon", e, "--measurement", "ud", "--condition",
                         "detectorD"});
    EXPECT_EQ(ud.out, slurp(dir / ("analyze_ud_" + e + ".json"))) << e;
    const auto exits = run({"analyze", "--epsilon", e, "--measurement", "exit-orthogonal"});
    EXPECT_EQ(exits.out, slurp(dir / ("analyze_exit_" + e + ".json"))) << e;
    const auto two = run({"analyze", "--topology", "two-path", "--epsilon", e, "--measurement", "min-error"});
    EXPECT_EQ(two.out, slurp(dir / ("analyze_twopath_" + e + ".json"))) << e;
    const auto sim = run({"simulate", "--epsilon", e, "--measurement", "ud", "--trials", "20000", "--seed", "7"});
    EXPECT_EQ(sim.out, slurp(dir / ("simulate_ud_" + e + ".json"))) << e;
  }
}
