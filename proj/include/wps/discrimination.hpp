#pragma once

// Measurements on the path marker: unambiguous discrimination of the three
// (or two) marker states, the orthogonal exit-discrimination measurement, and
// minimum-error success rates.

#include <array>
#include <cmath>
#include <string>

#include "wps/marker.hpp"
#include "wps/qcore.hpp"

namespace wps::discrimination {

enum class Topology { three_path, two_path };

inline const char* to_string(Topology t) { return t == Topology::three_path ? "three-path" : "two-path"; }

/// Three-state unambiguous discrimination with outcomes A, B, C and the inconclusive 0.
struct UdPovm3 {
  double epsilon = 0.0;
  std::array<CVector, 3> mu;
  CVector phi0;
  Povm povm;
};

inline UdPovm3 ud3(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  if (epsilon == 0.0) throw DegenerateFamilyError("ud3: the marker states coincide at epsilon = 0");
  const double tail = std::sqrt(epsilon / (3.0 - 6.0 * epsilon));
  UdPovm3 out;
  out.epsilon = epsilon;
  out.mu[0] = column({std::sqrt(0.5), -std::sqrt(1.0 / 6.0), tail});
  out.mu[1] = column({-std::sqrt(0.5), -std::sqrt(1.0 / 6.0), tail});
  out.mu[2] = column({0.0, std::sqrt(2.0 / 3.0), tail});
  out.phi0 = std::sqrt((1.0 - 3.0 * epsilon) / (1.0 - 2.0 * epsilon)) * basis_vector(3, 2);
  out.povm = Povm({"A", "B", "C", "0"},
                  {projector(out.mu[0]), projector(out.mu[1]), projector(out.mu[2]), projector(out.phi0)});
  return out;
}

/// Outcome statistics of the UD measurement on the marker state conditioned on detector D.
inline ProbabilityMap ud3_on_postselected(double epsilon) {
  const auto m = ud3(epsilon);
  return born(marker::rho_fin(marker::build_family(epsilon)), m.povm);
}

/// Orthogonal measurement telling the C route (outcome ii) from the loop route (outcome iii).
struct ExitPovm {
  double epsilon = 0.0;
  CVector phi_i, phi_ii, phi_iii;
  Povm povm;
};

inline ExitPovm exit_povm(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  if (epsilon == 0.0)
    throw DegenerateFamilyError("exit_povm: (psi_A - psi_B)/sqrt(6 epsilon) is undefined at epsilon = 0");
  ExitPovm out;
  out.epsilon = epsilon;
  out.phi_i = column({0.0, -std::sqrt(1.0 - 2.0 * epsilon), std::sqrt(2.0 * epsilon)});
  out.phi_ii = column({0.0, std::sqrt(2.0 * epsilon), std::sqrt(1.0 - 2.0 * epsilon)});
  out.phi_iii = column({1.0, 0.0, 0.0});
  out.povm = Povm({"i", "ii", "iii"}, {projector(out.phi_i), projector(out.phi_ii), projector(out.phi_iii)});
  return out;
}

/// A-priori weights of the exits i, ii, iii with BS3 in place and BS4 removed.
inline ProbabilityMap exit_prior_weights(double epsilon) {
  const auto f = marker::build_family(epsilon);
  ProbabilityMap out;
  out.set("i", (f.psi_b + f.psi_a).weight() / 6.0);
  out.set("ii", 2.0 * f.psi_c.weight() / 6.0);
  out.set("iii", (f.psi_b - f.psi_a).weight() / 6.0);
  return out;
}

/// Two-state unambiguous discrimination of the qubit markers, outcomes A, B, 0.
struct UdPovm2 {
  double epsilon = 0.0;
  Povm povm;
};

inline UdPovm2 ud2(double epsilon) {
  marker::check_two_path_epsilon(epsilon);
  if (epsilon == 0.0) throw DegenerateFamilyError("ud2: the marker states coincide at epsilon = 0");
  const double r = epsilon / (1.0 - epsilon);
  const double s = std::sqrt(r);
  const CMatrix pa = matrix({{r, -s}, {-s, 1.0}}) * 0.5;
  const CMatrix pb = matrix({{r, s}, {s, 1.0}}) * 0.5;
  const CMatrix p0 = matrix({{(1.0 - 2.0 * epsilon) / (1.0 - epsilon), 0.0}, {0.0, 0.0}});
  return {epsilon, Povm({"A", "B", "0"}, {pa, pb, p0})};
}

/// Helstrom measurement for equal-prior qubit markers psi_A, psi_B (outcomes A, B).
inline Povm two_path_min_error_povm(double epsilon) {
  marker::check_two_path_epsilon(epsilon);
  // Half-wave plate at 22.5 degrees followed by a polarizing split: A on h, B on v.
  const double r2 = std::sqrt(0.5);
  const CVector a = column({r2, -r2});
  const CVector b = column({r2, r2});
  return Povm({"A", "B"}, {projector(a), projector(b)});
}

/// Success probability of the minimum-error measurement with equal priors.
inline double min_error_success(double epsilon, Topology topology) {
  if (topology == Topology::three_path) {
    marker::check_three_path_epsilon(epsilon);
    const double s = std::sqrt(1.0 - 2.0 * epsilon) + 2.0 * std::sqrt(epsilon);
    return s * s / 3.0;
  }
  marker::check_two_path_epsilon(epsilon);
  return 0.5 + std::sqrt(epsilon * (1.0 - epsilon));
}

/// Average success sum_a p_a <psi_a|Pi_a|psi_a> for outcome labels matching the states.
inline double guess_success(const std::vector<std::pair<std::string, CVector>>& states, const Povm& povm) {
  double total = 0.0;
  for (const auto& [label, psi] : states) total += psi.dot(povm.element(label) * psi).real();
  return total / static_cast<double>(states.size());
}

}  // namespace wps::discrimination
