#pragma once

// Command-line front end: argument parsing, scenario assembly and output.
// Exit status: 0 success, 1 a check failed, 2 usage, parse or domain error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wps/commands.hpp"
#include "wps/report.hpp"
#include "wps/scenario.hpp"

namespace wps::cli {

inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

/// Scenario keys settable from flags. Unset flags leave the file or default value in place.
struct ScenarioFlags {
  std::string scenario_file;
  std::optional<std::string> topology;
  std::optional<double> epsilon;
  std::optional<double> phase;
  std::optional<std::vector<int>> beam_splitters;
  std::optional<std::string> measurement;
  std::optional<std::string> condition;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> optical_setup;
  std::optional<std::vector<std::string>> blocked_paths;

  void attach(CLI::App& app) {
    app.add_option("--scenario", scenario_file, "Scenario JSON file");
    app.add_option("--topology", topology, "three-path | two-path (default three-path)");
    app.add_option("--epsilon", epsilon, "Weak marking strength (default 0.04)");
    app.add_option("--phase", phase, "Interferometer phase in radians, two-path only (default 0)");
    app.add_option("--beamSplitters", beam_splitters, "Beam splitters in place, e.g. 1 2 3 4");
    app.add_option("--measurement", measurement, "ud | exit-orthogonal | min-error | none");
    app.add_option("--condition", condition, "detectorD | exit-i | exit-ii | unconditioned");
    app.add_option("--mode", mode, "analytic | montecarlo | betting");
    app.add_option("--trials", trials, "Number of Monte Carlo trials");
    app.add_option("--seed", seed, "RNG seed (default: $WPS_SEED, else 0)");
    app.add_option("--opticalSetup", optical_setup, "Built-in optical setup name");
    app.add_option("--blockedPaths", blocked_paths, "Blocked links: i ii iii");
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Merges defaults, the scenario file and flags (flags win), then validates.
inline scenario::Scenario assemble(const ScenarioFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  j["topology"] = "three-path";
  j["epsilon"] = 0.04;
  if (const char* env = std::getenv("WPS_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      j["seed"] = static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw DomainError(std::string("WPS_SEED: not a non-negative integer: ") + env);
    }
  }
  if (!f.scenario_file.empty()) {
    const nlohmann::json file = scenario::parse_json_strict(read_file(f.scenario_file));
    if (!file.is_object()) throw ParseError("scenario: top level must be a JSON object");
    for (const auto& [k, v] : file.items()) j[k] = v;
  }
  if (f.topology) j["topology"] = *f.topology;
  if (f.epsilon) j["epsilon"] = *f.epsilon;
  if (f.phase) j["phase"] = *f.phase;
  if (f.beam_splitters) j["beamSplitters"] = *f.beam_splitters;
  if (f.measurement) j["measurement"] = *f.measurement;
  if (f.condition) j["condition"] = *f.condition;
  if (f.mode) j["mode"] = *f.mode;
  if (f.trials) j["trials"] = *f.trials;
  if (f.seed) j["seed"] = *f.seed;
  if (f.optical_setup) j["opticalSetup"] = *f.optical_setup;
  if (f.blocked_paths) j["blockedPaths"] = *f.blocked_paths;
  return scenario::from_json(j);
}

inline void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + out_path + "'");
  f << text;
}

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "wps: weakly path-marked interferometers.\n"
      "Scenario values come from defaults, then --scenario FILE, then flags; flags take precedence.\n"
      "WPS_SEED sets the default seed; --seed or a seed in the file overrides it.",
      "wps"};
  app.require_subcommand(1);

  ScenarioFlags flags;
  std::string format = "json";
  std::string out_path;
  auto common = [&](CLI::App* sub, bool with_scenario) {
    if (with_scenario) flags.attach(*sub);
    sub->add_option("--format", format, "json | csv | text (default json)");
    sub->add_option("--out", out_path, "Write the report to this file instead of stdout");
  };

  auto* analyze = app.add_subcommand("analyze", "Closed-form report for a scenario");
  common(analyze, true);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run compared with the closed form");
  common(simulate, true);
  auto* bet = app.add_subcommand("bet", "Alice/Bob betting game");
  common(bet, true);

  auto* scan = app.add_subcommand("scan", "CSV sweep over phase or epsilon (two-path)");
  std::string scan_param = "phase";
  int points = 64;
  scan->add_option("--param", scan_param, "phase | epsilon")->check(CLI::IsMember({"phase", "epsilon"}));
  scan->add_option("--points", points, "Grid points (>= 8)");
  flags.attach(*scan);
  scan->add_option("--out", out_path, "Write the CSV to this file instead of stdout");

  auto* verify = app.add_subcommand("verify", "Network, factorization and measurement identity suite");
  double verify_eps = 0.04;
  verify->add_option("--epsilon", verify_eps, "Marking strength used for the marker checks (default 0.04)");
  common(verify, false);

  auto* optics_cmd = app.add_subcommand("optics", "Compile an optical setup and compare it with its abstract POVM");
  std::string setup_name;
  optics_cmd->add_option("--setup", setup_name, "Built-in setup name (overrides the scenario's opticalSetup)");
  common(optics_cmd, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    const auto fmt = report::parse_format(format);
    report::Report r;
    if (analyze->parsed()) {
      r = commands::analyze(assemble(flags));
    } else if (simulate->parsed()) {
      r = commands::simulate_run(assemble(flags));
    } else if (bet->parsed()) {
      r = commands::bet(assemble(flags));
    } else if (scan->parsed()) {
      if (!flags.topology && flags.scenario_file.empty()) flags.topology = "two-path";
      const auto s = assemble(flags);
      if (s.topology != scenario::Topology::two_path)
        throw ContractError("scan: sweeps are defined for the two-path topology");
      const auto param = scan_param == "phase" ? commands::ScanParam::phase : commands::ScanParam::epsilon;
      write_output(commands::scan_csv(param, s.epsilon, s.phase, points), out_path, out);
      return kOk;
    } else if (verify->parsed()) {
      r = commands::verify(verify_eps);
    } else if (optics_cmd->parsed()) {
      const auto s = assemble(flags);
      nlohmann::json spec;
      if (!setup_name.empty()) spec = setup_name;
      else if (s.optical_setup) spec = *s.optical_setup;
      else throw ContractError("optics: give --setup NAME or an opticalSetup in the scenario");
      r = commands::optics_check(spec, s.epsilon);
    }
    write_output(report::emit_report(r, fmt), out_path, out);
    return r.pass() ? kOk : kCheckFailed;
  } catch (const ParseError& e) {
    err << "parse error";
    if (e.line() > 0) err << " at line " << e.line() << ", column " << e.column();
    err << ": " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUsage;
}

inline int run_command(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace wps::cli
