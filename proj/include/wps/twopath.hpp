#pragma once

// Two-path (internal loop) interferometer with a qubit path marker.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "wps/discrimination.hpp"
#include "wps/interferometer.hpp"
#include "wps/marker.hpp"

namespace wps::twopath {

struct TwoPathModel {
  double epsilon = 0.0;
  /// Interferometer phase on the path-i (checkpoint A) amplitude.
  double phase = 0.0;

  void validate() const {
    marker::check_two_path_epsilon(epsilon);
    if (!std::isfinite(phase)) throw DomainError("TwoPathModel: phase must be finite");
  }
};

inline CMatrix beam_splitter() { return matrix({{1, 1}, {-1, 1}}) / std::sqrt(2.0); }

/// Path amplitudes at checkpoints A, B for a particle entering on path ii.
inline CVector checkpoint_amplitudes(double phase, std::array<bool, 2> blocked = {false, false}) {
  CVector f = beam_splitter() * basis_vector(2, 1);
  f(0) *= std::polar(1.0, phase);
  for (int p = 0; p < 2; ++p)
    if (blocked[static_cast<std::size_t>(p)]) f(p) = 0.0;
  return f;
}

/// Unnormalized marker columns at exits i and ii. Without BS3 exit i is fed by path i (checkpoint A).
inline std::array<marker::MarkerColumn, 2> exit_marker_states(const TwoPathModel& model, bool bs3_present = true,
                                                               std::array<bool, 2> blocked = {false, false}) {
  model.validate();
  const auto m = marker::two_path_markers(model.epsilon);
  const CVector f = checkpoint_amplitudes(model.phase, blocked);
  const CMatrix out = bs3_present ? beam_splitter() : identity(2);
  std::array<marker::MarkerColumn, 2> exits;
  for (int j = 0; j < 2; ++j) exits[static_cast<std::size_t>(j)] = {out(j, 0) * f(0) * m.psi_a.amps + out(j, 1) * f(1) * m.psi_b.amps};
  return exits;
}

struct DetectionAndStates {
  /// Probability that detector D (exit ii) fires.
  double p_detect = 0.0;
  /// Marker state conditioned on exit ii; absent when that exit is dark.
  std::optional<DensityOperator> rho_fin;
  /// Marker state conditioned on exit i.
  std::optional<DensityOperator> rho_fin_prime;
};

inline DetectionAndStates detection_and_states(const TwoPathModel& model) {
  const auto exits = exit_marker_states(model);
  DetectionAndStates out;
  out.p_detect = exits[1].weight();
  if (out.p_detect > 0.0) out.rho_fin = DensityOperator(CMatrix(projector(exits[1].amps) / out.p_detect));
  const double p_i = exits[0].weight();
  if (p_i > 0.0) out.rho_fin_prime = DensityOperator(CMatrix(projector(exits[0].amps) / p_i));
  return out;
}

/// Least-squares fit of p(phi) = a + b cos(phi) + c sin(phi); returns sqrt(b^2 + c^2)/a.
inline double fitted_visibility(const std::vector<double>& phases, const std::vector<double>& values) {
  if (phases.size() != values.size() || phases.size() < 3)
    throw ContractError("fitted_visibility: need at least three (phase, value) samples");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(phases.size()), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(phases.size()));
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    design(r, 0) = 1.0;
    design(r, 1) = std::cos(phases[k]);
    design(r, 2) = std::sin(phases[k]);
    rhs(r) = values[k];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  if (coef(0) <= 0.0) throw DomainError("fitted_visibility: non-positive mean");
  return std::hypot(coef(1), coef(2)) / coef(0);
}

struct FringeScan {
  std::vector<double> phases;
  std::vector<double> p_i;
  std::vector<double> p_ii;
  double visibility = 0.0;
};

/// Exit probabilities over n_points equally spaced phases in [0, 2 pi).
inline FringeScan fringe_scan(double epsilon, int n_points) {
  if (n_points < 8) throw DomainError("fringe_scan: need at least 8 points per period");
  FringeScan scan;
  for (int k = 0; k < n_points; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n_points;
    const auto exits = exit_marker_states({epsilon, phi});
    scan.phases.push_back(phi);
    scan.p_i.push_back(exits[0].weight());
    scan.p_ii.push_back(exits[1].weight());
  }
  scan.visibility = fitted_visibility(scan.phases, scan.p_ii);
  return scan;
}

/// Weak values of the path projectors at checkpoints A and B, post-selected on exit ii.
inline std::pair<Complex, Complex> twopath_weak_values(double phase) {
  const CVector fwd = checkpoint_amplitudes(phase);
  const CVector bwd = beam_splitter().adjoint() * basis_vector(2, 1);
  const auto w = interferometer::path_weak_values(bwd, fwd);
  return {w[0], w[1]};
}

struct WholeEnsembleTally {
  double known_a = 0.0;
  double known_b = 0.0;
  double unknowable = 0.0;
  /// Split of each class between exit i and exit ii (D).
  std::array<double, 2> known_a_exits{};
  std::array<double, 2> known_b_exits{};
  std::array<double, 2> unknowable_exits{};
};

/// Sorts all particles by Bob's UD outcome and Alice's exit, with BS3 in place and phase 0.
inline WholeEnsembleTally whole_ensemble_tally(double epsilon) {
  const auto exits = exit_marker_states({epsilon, 0.0});
  WholeEnsembleTally t;
  if (epsilon == 0.0) {
    // Identical markers: nothing is known, and every particle leaves through exit i.
    t.unknowable = 1.0;
    t.unknowable_exits = {1.0, 0.0};
    return t;
  }
  const auto ud = discrimination::ud2(epsilon);
  for (int j = 0; j < 2; ++j) {
    const auto p = born(StateVector(exits[static_cast<std::size_t>(j)].amps), ud.povm);
    t.known_a_exits[static_cast<std::size_t>(j)] = p.at("A");
    t.known_b_exits[static_cast<std::size_t>(j)] = p.at("B");
    t.unknowable_exits[static_cast<std::size_t>(j)] = p.at("0");
  }
  t.known_a = t.known_a_exits[0] + t.known_a_exits[1];
  t.known_b = t.known_b_exits[0] + t.known_b_exits[1];
  t.unknowable = t.unknowable_exits[0] + t.unknowable_exits[1];
  return t;
}

/// UD outcome statistics on the marker state conditioned on exit i or exit ii.
inline ProbabilityMap ud2_on_exit(double epsilon, int exit) {
  if (exit != 0 && exit != 1) throw ContractError("ud2_on_exit: exit must be 0 (i) or 1 (ii)");
  const auto states = detection_and_states({epsilon, 0.0});
  const auto& rho = exit == 1 ? states.rho_fin : states.rho_fin_prime;
  if (!rho) throw DomainError("ud2_on_exit: exit is dark");
  return born(*rho, discrimination::ud2(epsilon).povm);
}

}  // namespace wps::twopath
