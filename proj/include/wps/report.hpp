#pragma once

// Run reports and their json / csv / text renderings.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wps/errors.hpp"

namespace wps::report {

/// One reported number. `tag` is the closed-form expression the value comes from.
struct Value {
  std::string name;
  double value = 0.0;
  std::string tag;
  /// Closed-form reference, when one exists for this configuration.
  std::optional<double> expected;
  double tolerance = 1e-12;

  bool pass() const { return !expected || std::abs(value - *expected) <= tolerance; }
};

struct Check {
  std::string name;
  double deviation = 0.0;
  double tolerance = 1e-12;
  /// Overrides the deviation test (count-exact checks).
  std::optional<bool> verdict;

  bool pass() const { return verdict ? *verdict : deviation <= tolerance; }
};

inline Check make_check(std::string name, double deviation, double tolerance = 1e-12) {
  return {std::move(name), deviation, tolerance, std::nullopt};
}

struct MonteCarlo {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  struct Entry {
    std::string label;
    double expected = 0.0;
    double frequency = 0.0;
    std::optional<double> z;
    bool pass = true;
  };
  std::vector<Entry> entries;
};

struct Betting {
  std::uint64_t n = 0;
  std::uint64_t bets = 0;
  std::uint64_t wins = 0;
  double bet_rate = 0.0;
  std::optional<double> win_rate;
  double expected_bet_rate = 0.0;
  std::optional<double> bet_rate_z;
};

struct Report {
  std::string command;
  /// Canonical scenario echo; null when the command takes none.
  nlohmann::ordered_json scenario;
  std::vector<Value> values;
  std::vector<Check> checks;
  std::optional<MonteCarlo> monte_carlo;
  std::optional<Betting> betting;
  /// Extra failure conditions that are not tied to a single value.
  std::vector<std::string> failures;

  bool pass() const {
    if (!failures.empty()) return false;
    for (const auto& v : values)
      if (!v.pass()) return false;
    for (const auto& c : checks)
      if (!c.pass()) return false;
    if (monte_carlo)
      for (const auto& e : monte_carlo->entries)
        if (!e.pass) return false;
    return true;
  }
};

enum class Format { json, csv, text };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  throw DomainError("format: '" + s + "' is not one of json, csv, text");
}

/// Fifteen significant digits; non-finite values print as null.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

namespace detail {

inline void write_json(std::ostringstream& os, const nlohmann::ordered_json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) os << ",\n";
      first = false;
      os << pad << nlohmann::json(k).dump() << ": ";
      write_json(os, v, indent, depth + 1);
    }
    os << "\n" << close << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ",\n";
      os << pad;
      write_json(os, j[i], indent, depth + 1);
    }
    os << "\n" << close << "]";
  } else if (j.is_number_float()) {
    os << format_number(j.get<double>());
  } else {
    os << j.dump();
  }
}

inline nlohmann::ordered_json optional_number(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json();
}

}  // namespace detail

/// JSON text with floats at 15 significant digits.
inline std::string dump_json(const nlohmann::ordered_json& j) {
  std::ostringstream os;
  detail::write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

inline nlohmann::ordered_json to_json(const Report& r) {
  using J = nlohmann::ordered_json;
  J j;
  j["command"] = r.command;
  j["scenario"] = r.scenario;
  J values = J::array();
  for (const auto& v : r.values) {
    J e;
    e["name"] = v.name;
    e["value"] = v.value;
    e["tag"] = v.tag;
    e["expected"] = detail::optional_number(v.expected);
    e["pass"] = v.pass();
    values.push_back(e);
  }
  j["values"] = values;
  J checks = J::array();
  for (const auto& c : r.checks) {
    J e;
    e["name"] = c.name;
    e["deviation"] = c.deviation;
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass();
    checks.push_back(e);
  }
  j["checks"] = checks;
  if (r.monte_carlo) {
    J mc;
    mc["n"] = r.monte_carlo->n;
    mc["seed"] = r.monte_carlo->seed;
    J entries = J::array();
    for (const auto& e : r.monte_carlo->entries) {
      J x;
      x["label"] = e.label;
      x["expected"] = e.expected;
      x["frequency"] = e.frequency;
      x["z"] = detail::optional_number(e.z);
      x["pass"] = e.pass;
      entries.push_back(x);
    }
    mc["entries"] = entries;
    j["monteCarlo"] = mc;
  }
  if (r.betting) {
    J b;
    b["n"] = r.betting->n;
    b["bets"] = r.betting->bets;
    b["wins"] = r.betting->wins;
    b["betRate"] = r.betting->bet_rate;
    b["winRate"] = detail::optional_number(r.betting->win_rate);
    b["expectedBetRate"] = r.betting->expected_bet_rate;
    b["betRateZ"] = detail::optional_number(r.betting->bet_rate_z);
    j["betting"] = b;
  }
  j["failures"] = r.failures;
  j["pass"] = r.pass();
  return j;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string emit_report(const Report& r, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::json: return dump_json(to_json(r));
    case Format::csv: {
      using detail::csv_field;
      os << "section,name,value,reference,tag,pass\n";
      for (const auto& v : r.values)
        os << "value," << csv_field(v.name) << ',' << format_number(v.value) << ','
           << (v.expected ? format_number(*v.expected) : "") << ',' << csv_field(v.tag) << ','
           << (v.pass() ? "true" : "false") << '\n';
      for (const auto& c : r.checks)
        os << "check," << csv_field(c.name) << ',' << format_number(c.deviation) << ',' << format_number(c.tolerance)
           << ",," << (c.pass() ? "true" : "false") << '\n';
      if (r.monte_carlo)
        for (const auto& e : r.monte_carlo->entries)
          os << "montecarlo," << csv_field(e.label) << ',' << format_number(e.frequency) << ','
             << format_number(e.expected) << ',' << (e.z ? "z=" + format_number(*e.z) : "exact-count") << ','
             << (e.pass ? "true" : "false") << '\n';
      if (r.betting) {
        os << "betting,betRate," << format_number(r.betting->bet_rate) << ','
           << format_number(r.betting->expected_bet_rate) << ",,\n";
        os << "betting,winRate," << (r.betting->win_rate ? format_number(*r.betting->win_rate) : "") << ",,,\n";
      }
      for (const auto& f : r.failures) os << "failure," << csv_field(f) << ",,,,false\n";
      return os.str();
    }
    case Format::text: {
      os << "command: " << r.command << '\n';
      if (!r.scenario.is_null()) os << "scenario: " << r.scenario.dump() << '\n';
      for (const auto& v : r.values) {
        os << "  " << v.name << " = " << format_number(v.value) << "   [" << v.tag << "]";
        if (v.expected) os << (v.pass() ? "  ok" : "  MISMATCH vs " + format_number(*v.expected));
        os << '\n';
      }
      for (const auto& c : r.checks)
        os << "  " << (c.pass() ? "PASS " : "FAIL ") << c.name << "  (deviation " << format_number(c.deviation) << ")\n";
      if (r.monte_carlo) {
        os << "monte carlo: n=" << r.monte_carlo->n << " seed=" << r.monte_carlo->seed << '\n';
        for (const auto& e : r.monte_carlo->entries)
          os << "  " << (e.pass ? "PASS " : "FAIL ") << e.label << "  freq " << format_number(e.frequency) << "  p "
             << format_number(e.expected) << (e.z ? "  z " + format_number(*e.z) : "  exact count") << '\n';
      }
      if (r.betting) {
        os << "betting: bets " << r.betting->bets << " of " << r.betting->n << ", wins " << r.betting->wins
           << ", bet rate " << format_number(r.betting->bet_rate) << " (expected "
           << format_number(r.betting->expected_bet_rate) << ")";
        if (r.betting->win_rate) os << ", win rate " << format_number(*r.betting->win_rate);
        os << '\n';
      }
      for (const auto& f : r.failures) os << "  FAIL " << f << '\n';
      os << (r.pass() ? "result: pass\n" : "result: FAIL\n");
      return os.str();
    }
  }
  return {};
}

}  // namespace wps::report
