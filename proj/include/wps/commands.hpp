#pragma once

// Report builders behind the command-line subcommands. The CLI only parses
// arguments and renders; every number is produced here from the modules.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wps/discrimination.hpp"
#include "wps/interferometer.hpp"
#include "wps/marker.hpp"
#include "wps/optics.hpp"
#include "wps/report.hpp"
#include "wps/scenario.hpp"
#include "wps/simulate.hpp"
#include "wps/twopath.hpp"

namespace wps::commands {

using scenario::Condition;
using scenario::Measurement;
using scenario::Scenario;
using scenario::Topology;

struct ClosedForm {
  double value = 0.0;
  std::string tag;
};

/// Closed-form values known for the scenario's configuration, keyed like the report values.
inline std::map<std::string, ClosedForm> closed_forms(const Scenario& s) {
  std::map<std::string, ClosedForm> out;
  const double e = s.epsilon;
  const bool unblocked = s.blocked_paths.empty();
  if (!unblocked) return out;

  if (s.topology == Topology::three_path) {
    const bool full = s.has_beam_splitter(3) && s.has_beam_splitter(4);
    const bool verify = !s.has_beam_splitter(3) && !s.has_beam_splitter(4);
    const bool exit_mode = s.has_beam_splitter(3) && !s.has_beam_splitter(4);
    if (full && s.condition == Condition::detector_d) {
      out["p_condition"] = {(1.0 + 6.0 * e) / 9.0, "(1+6e)/9"};
      out["p_exit_iii"] = {1.0, "1"};
      if (s.measurement == Measurement::ud) {
        for (const char* a : {"A", "B", "C"}) out[std::string("p_bob_") + a] = {3.0 * e / (1.0 + 6.0 * e), "3e/(1+6e)"};
        out["p_bob_0"] = {(1.0 - 3.0 * e) / (1.0 + 6.0 * e), "(1-3e)/(1+6e)"};
        out["p_bet"] = {9.0 * e / (1.0 + 6.0 * e), "9e/(1+6e)"};
      } else if (s.measurement == Measurement::exit_orthogonal) {
        out["p_bob_i"] = {0.0, "0"};
        out["p_bob_ii"] = {1.0 / (1.0 + 6.0 * e), "(1/9)/((1/9)+(2/3)e) = 1/(1+6e)"};
        out["p_bob_iii"] = {6.0 * e / (1.0 + 6.0 * e), "((2/3)e)/((1/9)+(2/3)e) = 6e/(1+6e)"};
        out["p_bet"] = {1.0, "1"};
      }
    }
    if (s.condition == Condition::unconditioned) {
      out["p_condition"] = {1.0, "1"};
      if (verify) {
        for (const char* j : {"i", "ii", "iii"}) out[std::string("p_exit_") + j] = {1.0 / 3.0, "1/3"};
        if (s.measurement == Measurement::ud) {
          for (const char* a : {"A", "B", "C"}) out[std::string("p_bob_") + a] = {e, "(1/3)|mu_a^dag psi_a|^2 = e"};
          out["p_bob_0"] = {1.0 - 3.0 * e, "1-3e"};
          out["p_bet"] = {3.0 * e, "3e"};
        }
      }
      if (exit_mode) {
        out["p_exit_i"] = {(2.0 - 3.0 * e) / 3.0, "|psi_B+psi_A|^2/6 = (2-3e)/3"};
        out["p_exit_ii"] = {1.0 / 3.0, "2|psi_C|^2/6 = 1/3"};
        out["p_exit_iii"] = {e, "|psi_B-psi_A|^2/6 = e"};
      }
    }
  } else {
    const bool bs3 = s.has_beam_splitter(3);
    const double c = std::cos(s.phase);
    if (bs3) {
      const double p_ii = 0.5 * (1.0 - (1.0 - 2.0 * e) * c);
      if (s.condition == Condition::detector_d || s.condition == Condition::exit_ii)
        out["p_condition"] = {p_ii, "(1-(1-2e)cos(phi))/2"};
      if (s.condition == Condition::exit_i) out["p_condition"] = {1.0 - p_ii, "(1+(1-2e)cos(phi))/2"};
      if (s.condition == Condition::unconditioned) {
        out["p_condition"] = {1.0, "1"};
        out["p_exit_i"] = {1.0 - p_ii, "(1+(1-2e)cos(phi))/2"};
        out["p_exit_ii"] = {p_ii, "(1-(1-2e)cos(phi))/2"};
      }
      if (s.phase == 0.0 && s.measurement == Measurement::ud) {
        if (s.condition == Condition::detector_d || s.condition == Condition::exit_ii) {
          out["p_bob_A"] = {0.5, "1/2"};
          out["p_bob_B"] = {0.5, "1/2"};
          out["p_bob_0"] = {0.0, "0"};
        } else if (s.condition == Condition::exit_i) {
          out["p_bob_A"] = {e / (2.0 * (1.0 - e)), "e/(2(1-e))"};
          out["p_bob_B"] = {e / (2.0 * (1.0 - e)), "e/(2(1-e))"};
          out["p_bob_0"] = {(1.0 - 2.0 * e) / (1.0 - e), "(1-2e)/(1-e)"};
        } else {
          out["p_bob_A"] = {e, "e"};
          out["p_bob_B"] = {e, "e"};
          out["p_bob_0"] = {1.0 - 2.0 * e, "1-2e"};
        }
      }
    } else if (s.condition == Condition::unconditioned) {
      out["p_condition"] = {1.0, "1"};
      out["p_exit_i"] = {0.5, "1/2"};
      out["p_exit_ii"] = {0.5, "1/2"};
      if (s.measurement == Measurement::ud) {
        out["p_bob_A"] = {e, "e"};
        out["p_bob_B"] = {e, "e"};
        out["p_bob_0"] = {1.0 - 2.0 * e, "1-2e"};
        out["p_bet"] = {2.0 * e, "2e"};
      }
    }
  }
  if (s.measurement == Measurement::min_error) {
    if (s.topology == Topology::three_path)
      out["min_error_success"] = {discrimination::min_error_success(e, Topology::three_path),
                                  "(sqrt(1-2e)+2sqrt(e))^2/3"};
    else
      out["min_error_success"] = {discrimination::min_error_success(e, Topology::two_path), "1/2+sqrt(e(1-e))"};
  }
  return out;
}

namespace detail {

inline report::Value make_value(const std::map<std::string, ClosedForm>& forms, const std::string& name, double v,
                                const std::string& generic_tag) {
  report::Value out{name, v, generic_tag, std::nullopt, 1e-12};
  if (const auto it = forms.find(name); it != forms.end()) {
    out.tag = it->second.tag;
    out.expected = it->second.value;
  }
  return out;
}

inline const char* born_tag() { return "tr(Pi_b m_j m_j^dag) / p_condition"; }

/// Average success of guessing the marker state from the outcome, equal priors.
inline double min_error_guess_success(Topology topology, double epsilon) {
  if (topology == Topology::three_path) {
    const auto f = marker::build_family(epsilon);
    return discrimination::guess_success(
        {{"A", f.psi_a.amps}, {"B", f.psi_b.amps}, {"C", f.psi_c.amps}}, optics::three_path_min_error_povm(epsilon));
  }
  const auto m = marker::two_path_markers(epsilon);
  return discrimination::guess_success({{"A", m.psi_a.amps}, {"B", m.psi_b.amps}},
                                       discrimination::two_path_min_error_povm(epsilon));
}

}  // namespace detail

/// Closed-form report: joint-distribution marginals, each matched against its closed form where one exists.
inline report::Report analyze(const Scenario& s) {
  scenario::validate(s);
  const auto forms = closed_forms(s);
  const auto model = simulate::build_model(s);
  report::Report r;
  r.command = "analyze";
  r.scenario = scenario::to_json(s);
  r.values.push_back(detail::make_value(forms, "p_condition", model.postselection, "sum_j |m_j|^2 over kept exits"));
  const auto probs = simulate::analytic_probabilities(model);
  for (const auto& exit : model.exits)
    r.values.push_back(detail::make_value(forms, "p_exit_" + exit, probs.at("exit:" + exit), detail::born_tag()));
  if (s.measurement != Measurement::none) {
    double bet = 0.0;
    for (std::size_t b = 0; b < model.outcomes.size(); ++b) {
      const auto& label = model.outcomes[b];
      r.values.push_back(detail::make_value(forms, "p_bob_" + label, probs.at("bob:" + label), detail::born_tag()));
      if (model.bets[b]) bet += probs.at("bob:" + label);
    }
    r.values.push_back(detail::make_value(forms, "p_bet", bet, "sum of conclusive outcome probabilities"));
  }
  if (s.measurement == Measurement::min_error)
    r.values.push_back(detail::make_value(forms, "min_error_success", detail::min_error_guess_success(s.topology, s.epsilon),
                                          "(1/n) sum_a psi_a^dag Pi_a psi_a"));
  return r;
}

inline report::MonteCarlo monte_carlo_section(const simulate::TrialStats& st, const ProbabilityMap& analytic) {
  report::MonteCarlo mc;
  mc.n = st.n;
  mc.seed = st.seed;
  for (const auto& z : simulate::compare_to_analytic(st, analytic))
    mc.entries.push_back({z.label, z.expected, z.frequency, z.z, z.pass});
  return mc;
}

/// Analytic report plus sampled frequencies and their z-scores.
inline report::Report simulate_run(const Scenario& s) {
  report::Report r = analyze(s);
  r.command = "simulate";
  const auto model = simulate::build_model(s);
  const auto st = simulate::run_trials(model, s.trials, s.seed);
  r.monte_carlo = monte_carlo_section(st, simulate::analytic_probabilities(model));
  return r;
}

/// Betting game: zero-error bets must be won every time, and the bet rate must match the model.
inline report::Report bet(const Scenario& s) {
  if (s.measurement == Measurement::none) throw ContractError("bet: the scenario has no discrimination measurement");
  report::Report r = analyze(s);
  r.command = "bet";
  const auto model = simulate::build_model(s);
  const auto st = simulate::run_trials(model, s.trials, s.seed);
  r.monte_carlo = monte_carlo_section(st, simulate::analytic_probabilities(model));
  const auto b = simulate::tally_bets(model, st);
  report::Betting out{b.n, b.bets, b.wins, b.bet_rate, b.win_rate, b.expected_bet_rate, std::nullopt};
  const double p = b.expected_bet_rate;
  if (p > 0.0 && p < 1.0 && b.n > 0)
    out.bet_rate_z = (b.bet_rate - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(b.n));
  if (out.bet_rate_z && std::abs(*out.bet_rate_z) > simulate::kZThreshold)
    r.failures.push_back("bet rate outside 5 sigma of its expected value");
  const bool zero_error = s.measurement == Measurement::ud || s.measurement == Measurement::exit_orthogonal;
  if (zero_error && b.wins != b.bets)
    r.failures.push_back("zero-error measurement lost " + std::to_string(b.bets - b.wins) + " bets");
  r.betting = out;
  return r;
}

/// Network identities, operator factorizations and measurement identities at one epsilon.
inline report::Report verify(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  if (epsilon == 0.0 || epsilon >= 1.0 / 3.0)
    throw DomainError("verify: epsilon must satisfy 0 < epsilon < 1/3 so that every measurement is defined");
  report::Report r;
  r.command = "verify";
  r.scenario = nlohmann::ordered_json{{"epsilon", epsilon}};
  auto add = [&](const std::string& name, double dev) { r.checks.push_back(report::make_check(name, dev)); };
  const double e = epsilon;

  add("detection probability 1/9", std::abs(interferometer::forward_state({}, 4)[2] - 1.0 / 3.0) +
                                          std::abs(std::norm(interferometer::forward_state({}, 4)[2]) - 1.0 / 9.0));
  for (const auto& c : interferometer::verify_splits()) add(c.name, c.deviation);
  const auto w = interferometer::weak_values(interferometer::Split(2));
  add("weak values (-1, 1, 1) at the symmetric split",
      std::max({std::abs(w[0] + 1.0), std::abs(w[1] - 1.0), std::abs(w[2] - 1.0)}));
  const auto markers = interferometer::to_full(interferometer::LocalMarkers::symmetric(e));
  for (const auto& c : interferometer::verify_operator_factorizations(markers)) add(c.name, c.deviation);

  const auto f = marker::build_family(e);
  const CMatrix gram_expected = matrix({{1, 1 - 3 * e, 1 - 3 * e}, {1 - 3 * e, 1, 1 - 3 * e}, {1 - 3 * e, 1 - 3 * e, 1}});
  add("marker Gram matrix", max_abs_diff(f.gram(), gram_expected));
  add("|psi_B - psi_A|^2 = 6e", std::abs((f.psi_b - f.psi_a).weight() - 6.0 * e));
  add("(psi_B - psi_A) orthogonal to psi_C", std::abs((f.psi_b - f.psi_a).inner(f.psi_c)));

  const auto ud = discrimination::ud3_on_postselected(e);
  double dev = std::abs(ud.at("0") - (1.0 - 3.0 * e) / (1.0 + 6.0 * e));
  for (const char* a : {"A", "B", "C"}) dev = std::max(dev, std::abs(ud.at(a) - 3.0 * e / (1.0 + 6.0 * e)));
  add("UD statistics conditioned on D", dev);

  const auto ex = discrimination::exit_povm(e);
  const CVector loop = (f.psi_b - f.psi_a).amps;
  const CVector c_route = f.psi_c.amps;
  const double zeros = std::max({std::norm(ex.phi_i.dot(c_route)), std::norm(ex.phi_i.dot(loop)),
                                 std::norm(ex.phi_ii.dot(loop)), std::norm(ex.phi_iii.dot(c_route))});
  add("exit measurement zero pattern", zeros);
  const auto on_fin = born(marker::rho_fin(f), ex.povm);
  add("exit measurement on the D-conditioned marker",
      std::max({std::abs(on_fin.at("i")), std::abs(on_fin.at("ii") - 1.0 / (1.0 + 6.0 * e)),
                std::abs(on_fin.at("iii") - 6.0 * e / (1.0 + 6.0 * e))}));

  for (const auto& name : optics::builtin_setup_names()) {
    if (name == "fig11-mud" || name == "fig12-mem") continue;
    add("optical " + name + " equals its abstract POVM",
        optics::equivalence(optics::compile_setup(optics::builtin_setup(name, e)), optics::abstract_povm(name, e)));
  }
  add("two-path optical fig11-mud equals ud2",
      optics::equivalence(optics::compile_setup(optics::fig11_mud(e)), discrimination::ud2(e).povm));
  add("two-path optical fig12-mem equals the Helstrom measurement",
      optics::equivalence(optics::compile_setup(optics::fig12_mem(e)), discrimination::two_path_min_error_povm(e)));
  return r;
}

/// Compiles a setup, checks POVM validity, and compares it with the measurement it should realize.
inline report::Report optics_check(const nlohmann::json& setup_spec, double epsilon) {
  report::Report r;
  r.command = "optics";
  r.scenario = nlohmann::ordered_json{{"epsilon", epsilon},
                                      {"opticalSetup", nlohmann::ordered_json::parse(setup_spec.dump())}};
  const auto setup = scenario::setup_from_json(setup_spec, epsilon);
  const Povm povm = optics::compile_setup(setup);
  r.checks.push_back(report::make_check("completeness of the compiled POVM", povm.completeness_defect()));

  std::string reference;
  if (setup_spec.is_string()) reference = setup_spec.get<std::string>();
  else if (setup_spec.contains("compareTo")) reference = setup_spec.at("compareTo").get<std::string>();
  if (!reference.empty())
    r.checks.push_back(
        report::make_check("equivalence with " + reference, optics::equivalence(povm, optics::abstract_povm(reference, epsilon))));

  for (const auto& label : povm.labels()) {
    const CMatrix& el = povm.element(label);
    r.values.push_back({"trace Pi_" + label, el.trace().real(), "tr of the absorbed-amplitude form", std::nullopt, 1e-12});
  }
  if (reference == "fig12-mem")
    r.values.push_back({"min_error_success", detail::min_error_guess_success(Topology::two_path, epsilon),
                        "1/2+sqrt(e(1-e))", discrimination::min_error_success(epsilon, Topology::two_path), 1e-12});
  if (reference == "fig15-mem3")
    r.values.push_back({"min_error_success", detail::min_error_guess_success(Topology::three_path, epsilon),
                        "(sqrt(1-2e)+2sqrt(e))^2/3", discrimination::min_error_success(epsilon, Topology::three_path), 1e-12});
  return r;
}

enum class ScanParam { phase, epsilon };

/// Two-path sweep as CSV rows: param,value,p_exit_i,p_exit_ii,visibility.
inline std::string scan_csv(ScanParam param, double epsilon, double phase, int points) {
  if (points < 8) throw DomainError("scan: need at least 8 points");
  std::ostringstream os;
  os << "param,value,p_exit_i,p_exit_ii,visibility\n";
  if (param == ScanParam::phase) {
    const auto scan = twopath::fringe_scan(epsilon, points);
    for (std::size_t k = 0; k < scan.phases.size(); ++k)
      os << "phase," << report::format_number(scan.phases[k]) << ',' << report::format_number(scan.p_i[k]) << ','
         << report::format_number(scan.p_ii[k]) << ',' << report::format_number(scan.visibility) << '\n';
    return os.str();
  }
  for (int k = 0; k < points; ++k) {
    const double e = 0.5 * k / (points - 1);
    const auto exits = twopath::exit_marker_states({e, phase});
    const double vis = twopath::fringe_scan(e, 64).visibility;
    os << "epsilon," << report::format_number(e) << ',' << report::format_number(exits[0].weight()) << ','
       << report::format_number(exits[1].weight()) << ',' << report::format_number(vis) << '\n';
  }
  return os.str();
}

}  // namespace wps::commands
