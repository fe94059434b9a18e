#pragma once

// Scenario files: one flat JSON object per experiment run.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wps/discrimination.hpp"
#include "wps/errors.hpp"
#include "wps/marker.hpp"
#include "wps/optics.hpp"

namespace wps::scenario {

using discrimination::Topology;

enum class Measurement { ud, exit_orthogonal, min_error, none };
enum class Condition { detector_d, exit_i, exit_ii, unconditioned };
enum class Mode { analytic, montecarlo, betting };

inline const char* to_string(Measurement m) {
  switch (m) {
    case Measurement::ud: return "ud";
    case Measurement::exit_orthogonal: return "exit-orthogonal";
    case Measurement::min_error: return "min-error";
    default: return "none";
  }
}

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::detector_d: return "detectorD";
    case Condition::exit_i: return "exit-i";
    case Condition::exit_ii: return "exit-ii";
    default: return "unconditioned";
  }
}

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::analytic: return "analytic";
    case Mode::montecarlo: return "montecarlo";
    default: return "betting";
  }
}

inline constexpr std::uint64_t kDefaultTrials = 100000;

struct Scenario {
  Topology topology = Topology::three_path;
  double epsilon = 0.0;
  double phase = 0.0;
  /// Beam splitters in place, by number (1..4 three-path, 2..3 two-path).
  std::vector<int> beam_splitters;
  Measurement measurement = Measurement::none;
  Condition condition = Condition::detector_d;
  Mode mode = Mode::analytic;
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  /// Built-in setup name (string) or setup descriptor (object).
  std::optional<nlohmann::json> optical_setup;
  /// Blocked links by path label: i, ii, iii.
  std::vector<std::string> blocked_paths;

  bool has_beam_splitter(int n) const {
    return std::find(beam_splitters.begin(), beam_splitters.end(), n) != beam_splitters.end();
  }

  int path_count() const { return topology == Topology::three_path ? 3 : 2; }

  bool blocked(int path) const {
    static const std::array<const char*, 3> names{"i", "ii", "iii"};
    return std::find(blocked_paths.begin(), blocked_paths.end(), names[static_cast<std::size_t>(path)]) !=
           blocked_paths.end();
  }
};

inline std::vector<int> default_beam_splitters(Topology t) {
  return t == Topology::three_path ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{2, 3};
}

/// Range and cross-field checks. Throws DomainError naming the field, or ContractError for combinations.
inline void validate(const Scenario& s) {
  if (s.topology == Topology::three_path) {
    if (!std::isfinite(s.epsilon) || s.epsilon < 0.0 || s.epsilon > 1.0 / 3.0)
      throw DomainError("epsilon: three-path topology requires 0 <= epsilon <= 1/3");
    if (s.phase != 0.0)
      throw ContractError("phase: the three-path model has no interferometer phase; use the two-path topology");
  } else {
    if (!std::isfinite(s.epsilon) || s.epsilon < 0.0 || s.epsilon > 0.5)
      throw DomainError("epsilon: two-path topology requires 0 <= epsilon <= 1/2");
    if (!std::isfinite(s.phase)) throw DomainError("phase: must be finite");
  }

  const std::vector<int> allowed = default_beam_splitters(s.topology);
  std::set<int> seen;
  for (int b : s.beam_splitters) {
    if (std::find(allowed.begin(), allowed.end(), b) == allowed.end())
      throw DomainError("beamSplitters: " + std::to_string(b) + " is not a beam splitter of the " +
                        discrimination::to_string(s.topology) + " interferometer");
    if (!seen.insert(b).second) throw DomainError("beamSplitters: " + std::to_string(b) + " listed twice");
  }
  const int source_side = s.topology == Topology::three_path ? 1 : 2;
  for (int b = source_side; b <= 2; ++b)
    if (!s.has_beam_splitter(b))
      throw ContractError("beamSplitters: BS" + std::to_string(b) + " prepares the path superposition and must be present");

  std::set<std::string> blocked;
  for (const auto& p : s.blocked_paths) {
    const bool ok = p == "i" || p == "ii" || (p == "iii" && s.topology == Topology::three_path);
    if (!ok) throw DomainError("blockedPaths: unknown path label '" + p + "'");
    if (!blocked.insert(p).second) throw DomainError("blockedPaths: '" + p + "' listed twice");
  }

  if (s.topology == Topology::two_path && s.measurement == Measurement::exit_orthogonal)
    throw ContractError("measurement: exit-orthogonal applies to the three-path marker only");
  if (s.mode != Mode::analytic && s.trials < 1) throw DomainError("trials: must be at least 1 in montecarlo and betting modes");
  if (s.mode == Mode::betting) {
    if (s.measurement == Measurement::none)
      throw ContractError("mode: betting needs a discrimination measurement (measurement is none)");
    // Outcome ii also fires for particles leaving through exit i, so the exit measurement only
    // supports zero-error bets once Alice keeps exits ii and iii.
    if (s.measurement == Measurement::exit_orthogonal && s.condition != Condition::detector_d &&
        s.condition != Condition::exit_ii)
      throw ContractError("condition: betting with the exit-orthogonal measurement needs condition detectorD or exit-ii");
  }
  if (s.optical_setup && !s.optical_setup->is_string() && !s.optical_setup->is_object())
    throw DomainError("opticalSetup: must be a built-in setup name or a descriptor object");
  if (s.optical_setup && s.optical_setup->is_string()) {
    const auto& names = optics::builtin_setup_names();
    const auto name = s.optical_setup->get<std::string>();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw DomainError("opticalSetup: unknown built-in setup '" + name + "'");
  }
}

namespace detail {

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {"topology", "epsilon",   "phase", "beamSplitters",
                                                "measurement", "condition", "mode",  "trials",
                                                "seed",        "opticalSetup", "blockedPaths"};
  return keys;
}

inline ParseError located(const nlohmann::json::parse_error& e) {
  static const std::regex where(R"(line (\d+), column (\d+))");
  std::smatch m;
  const std::string what = e.what();
  std::size_t line = 0, col = 0;
  if (std::regex_search(what, m, where)) {
    line = std::stoul(m[1]);
    col = std::stoul(m[2]);
  }
  return ParseError("scenario: syntax error: " + what, line, col);
}

template <class T>
T enum_field(const nlohmann::json& j, const std::string& key, std::initializer_list<std::pair<const char*, T>> options) {
  if (!j.is_string()) throw ParseError("scenario: " + key + " must be a string");
  const auto value = j.get<std::string>();
  std::string listing;
  for (const auto& [name, v] : options) {
    if (value == name) return v;
    listing += std::string(listing.empty() ? "" : ", ") + name;
  }
  throw DomainError(key + ": '" + value + "' is not one of " + listing);
}

inline std::uint64_t count_field(const nlohmann::json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) throw DomainError(key + ": must be non-negative");
  throw ParseError("scenario: " + key + " must be an integer");
}

inline double real_field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ParseError("scenario: " + key + " must be a number");
  return j.get<double>();
}

}  // namespace detail

inline Topology parse_topology(const std::string& text) {
  return detail::enum_field<Topology>(nlohmann::json(text), "topology",
                                      {{"three-path", Topology::three_path}, {"two-path", Topology::two_path}});
}

inline Measurement parse_measurement(const std::string& text) {
  return detail::enum_field<Measurement>(nlohmann::json(text), "measurement",
                                         {{"ud", Measurement::ud},
                                          {"exit-orthogonal", Measurement::exit_orthogonal},
                                          {"min-error", Measurement::min_error},
                                          {"none", Measurement::none}});
}

inline Condition parse_condition(const std::string& text) {
  return detail::enum_field<Condition>(nlohmann::json(text), "condition",
                                       {{"detectorD", Condition::detector_d},
                                        {"exit-i", Condition::exit_i},
                                        {"exit-ii", Condition::exit_ii},
                                        {"unconditioned", Condition::unconditioned}});
}

inline Mode parse_mode(const std::string& text) {
  return detail::enum_field<Mode>(nlohmann::json(text), "mode",
                                  {{"analytic", Mode::analytic}, {"montecarlo", Mode::montecarlo}, {"betting", Mode::betting}});
}

/// Parses JSON text with duplicate-key detection. Syntax errors carry line and column.
inline nlohmann::json parse_json_strict(const std::string& text) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  nlohmann::json::parser_callback_t cb = [&](int, nlohmann::json::parse_event_t event, nlohmann::json& parsed) {
    using E = nlohmann::json::parse_event_t;
    if (event == E::object_start) keys.emplace_back();
    if (event == E::object_end && !keys.empty()) keys.pop_back();
    if (event == E::key && !keys.empty() && !keys.back().insert(parsed.get<std::string>()).second && duplicate.empty())
      duplicate = parsed.get<std::string>();
    return true;
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, cb);
  } catch (const nlohmann::json::parse_error& e) {
    throw detail::located(e);
  }
  if (!duplicate.empty()) throw ParseError("scenario: duplicate key '" + duplicate + "'");
  return j;
}

/// Builds a Scenario from an already parsed object. Missing optional keys take their defaults.
inline Scenario from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("scenario: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const auto& known = detail::known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError("scenario: unknown key '" + key + "'");
  }
  if (!j.contains("topology")) throw ParseError("scenario: missing required key 'topology'");
  if (!j.contains("epsilon")) throw ParseError("scenario: missing required key 'epsilon'");

  Scenario s;
  if (!j.at("topology").is_string()) throw ParseError("scenario: topology must be a string");
  s.topology = parse_topology(j.at("topology").get<std::string>());
  s.epsilon = detail::real_field(j.at("epsilon"), "epsilon");
  if (j.contains("phase")) s.phase = detail::real_field(j.at("phase"), "phase");
  if (j.contains("beamSplitters")) {
    if (!j.at("beamSplitters").is_array()) throw ParseError("scenario: beamSplitters must be an array of integers");
    for (const auto& b : j.at("beamSplitters")) {
      if (!b.is_number_integer()) throw ParseError("scenario: beamSplitters must be an array of integers");
      s.beam_splitters.push_back(b.get<int>());
    }
  } else {
    s.beam_splitters = default_beam_splitters(s.topology);
  }
  if (j.contains("measurement")) {
    if (!j.at("measurement").is_string()) throw ParseError("scenario: measurement must be a string");
    s.measurement = parse_measurement(j.at("measurement").get<std::string>());
  }
  if (j.contains("condition")) {
    if (!j.at("condition").is_string()) throw ParseError("scenario: condition must be a string");
    s.condition = parse_condition(j.at("condition").get<std::string>());
  }
  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) throw ParseError("scenario: mode must be a string");
    s.mode = parse_mode(j.at("mode").get<std::string>());
  }
  if (j.contains("trials")) s.trials = detail::count_field(j.at("trials"), "trials");
  if (j.contains("seed")) s.seed = detail::count_field(j.at("seed"), "seed");
  if (j.contains("opticalSetup") && !j.at("opticalSetup").is_null()) s.optical_setup = j.at("opticalSetup");
  if (j.contains("blockedPaths")) {
    if (!j.at("blockedPaths").is_array()) throw ParseError("scenario: blockedPaths must be an array of path labels");
    for (const auto& p : j.at("blockedPaths")) {
      if (!p.is_string()) throw ParseError("scenario: blockedPaths must be an array of path labels");
      s.blocked_paths.push_back(p.get<std::string>());
    }
  }
  validate(s);
  return s;
}

inline Scenario parse_scenario(const std::string& text) { return from_json(parse_json_strict(text)); }

/// Canonical form: every key, fixed order, sorted beam splitters and blocked paths.
inline nlohmann::ordered_json to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["topology"] = discrimination::to_string(s.topology);
  j["epsilon"] = s.epsilon;
  j["phase"] = s.phase;
  std::vector<int> bs = s.beam_splitters;
  std::sort(bs.begin(), bs.end());
  j["beamSplitters"] = bs;
  j["measurement"] = to_string(s.measurement);
  j["condition"] = to_string(s.condition);
  j["mode"] = to_string(s.mode);
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["opticalSetup"] = s.optical_setup ? nlohmann::ordered_json::parse(s.optical_setup->dump()) : nlohmann::ordered_json();
  std::vector<std::string> blocked = s.blocked_paths;
  std::sort(blocked.begin(), blocked.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  j["blockedPaths"] = blocked;
  return j;
}

inline std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

/// Setup described by the scenario's opticalSetup field.
inline optics::OpticalSetup setup_from_json(const nlohmann::json& j, double epsilon) {
  using namespace optics;
  if (j.is_string()) return builtin_setup(j.get<std::string>(), epsilon);
  if (!j.is_object()) throw ParseError("opticalSetup: expected a setup name or descriptor object");
  auto int_at = [](const nlohmann::json& o, const char* key) {
    if (!o.contains(key) || !o.at(key).is_number_integer())
      throw ParseError(std::string("opticalSetup: integer field '") + key + "' required");
    return o.at(key).get<int>();
  };
  auto pol_of = [](const nlohmann::json& o) {
    const std::string p = o.get<std::string>();
    if (p == "V") return Pol::v;
    if (p == "H") return Pol::h;
    throw DomainError("opticalSetup: polarization must be V or H, got '" + p + "'");
  };
  OpticalSetup s;
  s.name = j.value("name", std::string("custom"));
  s.paths = int_at(j, "paths");
  if (!j.contains("inputs") || !j.at("inputs").is_array()) throw ParseError("opticalSetup: 'inputs' array required");
  for (const auto& in : j.at("inputs")) s.inputs.push_back({int_at(in, "path"), pol_of(in.at("pol"))});
  if (!j.contains("elements") || !j.at("elements").is_array()) throw ParseError("opticalSetup: 'elements' array required");
  for (const auto& el : j.at("elements")) {
    const std::string type = el.value("type", std::string());
    if (type == "hwp") {
      if (!el.contains("thetaDegrees") || !el.at("thetaDegrees").is_number())
        throw ParseError("opticalSetup: hwp needs numeric 'thetaDegrees'");
      s.elements.push_back(Hwp{int_at(el, "path"), degrees(el.at("thetaDegrees").get<double>())});
    } else if (type == "pbs") {
      s.elements.push_back(Pbs{int_at(el, "p"), int_at(el, "q")});
    } else if (type == "sbs") {
      s.elements.push_back(BeamSplitter{int_at(el, "p"), int_at(el, "q"), symmetric_beam_splitter()});
    } else if (type == "beamSplitter") {
      // Matrix rows of real numbers or [re, im] pairs.
      const auto& rows = el.at("matrix");
      CMatrix m(2, 2);
      if (!rows.is_array() || rows.size() != 2) throw ShapeError("opticalSetup: beamSplitter matrix must be 2x2");
      for (std::size_t r = 0; r < 2; ++r) {
        if (!rows[r].is_array() || rows[r].size() != 2) throw ShapeError("opticalSetup: beamSplitter matrix must be 2x2");
        for (std::size_t c = 0; c < 2; ++c) {
          const auto& x = rows[r][c];
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              x.is_array() ? Complex(x.at(0).get<double>(), x.at(1).get<double>()) : Complex(x.get<double>(), 0.0);
        }
      }
      s.elements.push_back(BeamSplitter{int_at(el, "p"), int_at(el, "q"), m});
    } else if (type == "ppc") {
      s.elements.push_back(Ppc{int_at(el, "p"), int_at(el, "q")});
    } else if (type == "reversePpc") {
      s.elements.push_back(ReversePpc{int_at(el, "p"), int_at(el, "q")});
    } else if (type == "detector") {
      Detector d{int_at(el, "path"), std::nullopt, el.value("label", std::string())};
      if (el.contains("pol")) d.pol = pol_of(el.at("pol"));
      s.elements.push_back(d);
    } else if (type == "polarizer") {
      s.elements.push_back(Polarizer{int_at(el, "path"), pol_of(el.at("pass"))});
    } else {
      throw DomainError("opticalSetup: unknown element type '" + type + "'");
    }
  }
  return s;
}

}  // namespace wps::scenario
