#pragma once

// Symmetric marker family in its three-dimensional span representation, the
// entangled marker-particle states at the various stages of the three-path
// interferometer, and the qubit marker states of the two-path model.

#include <array>
#include <cmath>
#include <string>

#include "wps/interferometer.hpp"
#include "wps/qcore.hpp"

namespace wps::marker {

/// Column of marker amplitudes. Kept apart from PathColumn so the two cannot be mixed.
struct MarkerColumn {
  CVector amps;

  double weight() const { return amps.squaredNorm(); }
  Complex inner(const MarkerColumn& other) const { return amps.dot(other.amps); }
  MarkerColumn operator+(const MarkerColumn& o) const { return {amps + o.amps}; }
  MarkerColumn operator-(const MarkerColumn& o) const { return {amps - o.amps}; }
  MarkerColumn operator*(Complex s) const { return {s * amps}; }
};

/// Column of path amplitudes; its squared norm is the weight of the subensemble it describes.
struct PathColumn {
  CVector amps;

  double weight() const { return amps.squaredNorm(); }
};

inline void check_three_path_epsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon > 1.0 / 3.0)
    throw DomainError("epsilon must satisfy 0 <= epsilon <= 1/3 for the three-path family");
}

inline void check_two_path_epsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon > 0.5)
    throw DomainError("epsilon must satisfy 0 <= epsilon <= 1/2 for the two-path model");
}

/// Final marker states psi_A, psi_B, psi_C, with pairwise overlaps 1 - 3 epsilon.
struct MarkerFamily {
  double epsilon = 0.0;
  MarkerColumn psi_a, psi_b, psi_c;
  /// Initial marker state. It lies outside span{psi_A, psi_B, psi_C}, so it lives in
  /// that span plus one extra direction (4 components).
  MarkerColumn psi;

  const MarkerColumn& state(int path) const { return path == 0 ? psi_a : (path == 1 ? psi_b : psi_c); }

  /// A 3-component marker column placed in the 4-component space of `psi`.
  static MarkerColumn extend(const MarkerColumn& m) {
    CVector v = CVector::Zero(4);
    v.head(3) = m.amps;
    return {v};
  }

  CMatrix gram() const {
    CMatrix g(3, 3);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g(a, b) = state(a).inner(state(b));
    return g;
  }
};

inline MarkerFamily build_family(double epsilon) {
  check_three_path_epsilon(epsilon);
  const double e = epsilon;
  MarkerFamily f;
  f.epsilon = e;
  f.psi_a = {column({std::sqrt(1.5 * e), -std::sqrt(0.5 * e), std::sqrt(1.0 - 2.0 * e)})};
  f.psi_b = {column({-std::sqrt(1.5 * e), -std::sqrt(0.5 * e), std::sqrt(1.0 - 2.0 * e)})};
  f.psi_c = {column({0.0, std::sqrt(2.0 * e), std::sqrt(1.0 - 2.0 * e)})};

  // Overlap sqrt(1-3e) with each psi_a fixes the in-span part; the remainder is orthogonal.
  const CVector sum = f.psi_a.amps + f.psi_b.amps + f.psi_c.amps;
  CVector psi = CVector::Zero(4);
  psi.head(3) = std::sqrt(1.0 - 3.0 * e) / (3.0 - 6.0 * e) * sum;
  psi(3) = std::sqrt(e / (1.0 - 2.0 * e));
  f.psi = {psi};
  return f;
}

enum class Stage {
  /// After A, B, C acted, before BS3.
  checkpoints,
  after_bs3,
  /// After BS3 with the path-i component (which never reaches BS4) projected out.
  before_bs4,
  /// After BS4, before detection at exits i, ii, iii.
  exit,
};

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::checkpoints: return "checkpoints";
    case Stage::after_bs3: return "after-bs3";
    case Stage::before_bs4: return "before-bs4";
    default: return "exit";
  }
}

/// Entangled marker-particle state: three marker columns, one per path.
struct JointState {
  Stage stage = Stage::checkpoints;
  std::array<MarkerColumn, 3> paths;

  /// Flattened path (x) marker amplitudes, path index slowest.
  CVector flatten() const {
    const Eigen::Index d = paths[0].amps.size();
    CVector v(3 * d);
    for (int p = 0; p < 3; ++p) v.segment(p * d, d) = paths[static_cast<std::size_t>(p)].amps;
    return v;
  }

  double weight() const { return paths[0].weight() + paths[1].weight() + paths[2].weight(); }
};

/// Applies a path matrix to the marker columns: out_j = sum_p m(j, p) in_p.
inline std::array<MarkerColumn, 3> apply_path_matrix(const CMatrix& m, const std::array<MarkerColumn, 3>& in) {
  std::array<MarkerColumn, 3> out;
  for (int j = 0; j < 3; ++j) {
    CVector acc = CVector::Zero(in[0].amps.size());
    for (int p = 0; p < 3; ++p) acc += m(j, p) * in[static_cast<std::size_t>(p)].amps;
    out[static_cast<std::size_t>(j)] = {acc};
  }
  return out;
}

inline JointState joint_state(const MarkerFamily& family, Stage stage) {
  const auto u = interferometer::standard_unitaries();
  const double r3 = std::sqrt(3.0);
  JointState s;
  s.stage = stage;
  s.paths = {family.psi_a * (1.0 / r3), family.psi_b * (1.0 / r3), family.psi_c * (1.0 / r3)};
  if (stage == Stage::checkpoints) return s;
  s.paths = apply_path_matrix(u.u3.matrix(), s.paths);
  if (stage == Stage::after_bs3) return s;
  if (stage == Stage::before_bs4) {
    s.paths[0] = {CVector::Zero(3)};
    return s;
  }
  s.paths = apply_path_matrix(u.u4.matrix(), s.paths);
  return s;
}

/// Marker state conditioned on detection by D: projector onto (psi_C + psi_B - psi_A)/sqrt(1 + 6 epsilon).
inline DensityOperator rho_fin(const MarkerFamily& family) {
  const MarkerColumn v = family.psi_c + family.psi_b - family.psi_a;
  return DensityOperator(CMatrix(projector(v.amps) / (1.0 + 6.0 * family.epsilon)));
}

/// Qubit marker states (v, h) for the checkpoints A and B of the two-path interferometer.
struct TwoPathMarkers {
  double epsilon = 0.0;
  MarkerColumn psi_a, psi_b;
};

inline TwoPathMarkers two_path_markers(double epsilon) {
  check_two_path_epsilon(epsilon);
  const double c = std::sqrt(1.0 - epsilon);
  const double s = std::sqrt(epsilon);
  return {epsilon, {column({c, -s})}, {column({c, s})}};
}

}  // namespace wps::marker
