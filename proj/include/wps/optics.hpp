#pragma once

// Linear-optics layer: wave plates, beam splitters and detectors acting on
// (path, polarization) modes, compiled into POVMs on the input modes; and the
// photon-pair sources that supply the path markers.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "wps/discrimination.hpp"
#include "wps/interferometer.hpp"
#include "wps/marker.hpp"
#include "wps/qcore.hpp"

namespace wps::optics {

enum class Pol { v = 0, h = 1 };

inline const char* to_string(Pol p) { return p == Pol::v ? "V" : "H"; }

struct Mode {
  int path = 0;
  Pol pol = Pol::v;
};

/// Half-wave plate with set angle theta on the (v, h) column.
inline UnitaryOperator hwp(double theta) {
  if (!std::isfinite(theta)) throw DomainError("hwp: angle must be finite");
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return UnitaryOperator(matrix({{c, s}, {s, -c}}));
}

inline double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

/// Set angle theta with cos(2 theta) = c.
inline double hwp_angle_for_cos(double c) {
  if (!(c >= -1.0 && c <= 1.0)) throw DomainError("hwp_angle_for_cos: |cos 2theta| must not exceed 1");
  return 0.5 * std::acos(c);
}

struct Hwp {
  int path = 0;
  double theta = 0.0;
};

/// Polarizing beam splitter: horizontal stays on its path, vertical swaps between p and q.
struct Pbs {
  int p = 0, q = 1;
};

/// Polarization-independent two-port coupler: (out_p, out_q) = m (in_p, in_q).
struct BeamSplitter {
  int p = 0, q = 1;
  CMatrix m;
};

/// Polarization-to-path converter: PBS(p, q) then HWP at 45 degrees on q. Horizontal input leaves on p,
/// vertical input on q, both horizontally polarized.
struct Ppc {
  int p = 0, q = 1;
};

/// Reverse converter: HWP at 45 degrees on p, then PBS(p, q). Path p becomes h, path q becomes v, both on p.
struct ReversePpc {
  int p = 0, q = 1;
};

/// Photon counter on a path; absorbs one polarization or both.
struct Detector {
  int path = 0;
  std::optional<Pol> pol;
  std::string label;
};

/// Passes `pass` and discards the other polarization. Not lossless, so setups containing
/// one cannot be compiled to a POVM.
struct Polarizer {
  int path = 0;
  Pol pass = Pol::v;
};

using Element = std::variant<Hwp, Pbs, BeamSplitter, Ppc, ReversePpc, Detector, Polarizer>;

inline CMatrix symmetric_beam_splitter() { return matrix({{1, -1}, {1, 1}}) / std::sqrt(2.0); }

struct OpticalSetup {
  std::string name;
  int paths = 1;
  /// Mode carrying each basis vector of the input space.
  std::vector<Mode> inputs;
  std::vector<Element> elements;
};

inline int mode_index(int path, Pol pol) { return 2 * path + static_cast<int>(pol); }

namespace detail {

inline void check_path(const OpticalSetup& s, int path, const char* what) {
  if (path < 0 || path >= s.paths)
    throw WiringError(std::string(what) + ": path " + std::to_string(path) + " outside 0.." +
                      std::to_string(s.paths - 1));
}

inline void check_pair(const OpticalSetup& s, int p, int q, const char* what) {
  check_path(s, p, what);
  check_path(s, q, what);
  if (p == q) throw WiringError(std::string(what) + ": the two ports must differ");
}

inline void apply_hwp(CVector& a, int path, double theta) {
  const CMatrix u = hwp(theta).matrix();
  const int iv = mode_index(path, Pol::v), ih = mode_index(path, Pol::h);
  const Complex v = a(iv), h = a(ih);
  a(iv) = u(0, 0) * v + u(0, 1) * h;
  a(ih) = u(1, 0) * v + u(1, 1) * h;
}

inline void apply_pbs(CVector& a, int p, int q) { std::swap(a(mode_index(p, Pol::v)), a(mode_index(q, Pol::v))); }

inline void apply_coupler(CVector& a, int p, int q, const CMatrix& m) {
  for (Pol pol : {Pol::v, Pol::h}) {
    const int ip = mode_index(p, pol), iq = mode_index(q, pol);
    const Complex x = a(ip), y = a(iq);
    a(ip) = m(0, 0) * x + m(0, 1) * y;
    a(iq) = m(1, 0) * x + m(1, 1) * y;
  }
}

}  // namespace detail

/// Absorbed amplitudes: one row per (detector, absorbed mode), one column per input basis vector.
struct Propagation {
  std::vector<std::string> labels;
  std::vector<CVector> rows;
};

inline Propagation propagate(const OpticalSetup& setup, double tol = kTolerance) {
  if (setup.paths < 1) throw WiringError("setup needs at least one path");
  if (setup.inputs.empty()) throw WiringError("setup has no input modes");
  const int n_modes = 2 * setup.paths;
  const auto n_in = static_cast<Eigen::Index>(setup.inputs.size());
  for (std::size_t i = 0; i < setup.inputs.size(); ++i) {
    detail::check_path(setup, setup.inputs[i].path, "input");
    for (std::size_t j = 0; j < i; ++j)
      if (mode_index(setup.inputs[i].path, setup.inputs[i].pol) == mode_index(setup.inputs[j].path, setup.inputs[j].pol))
        throw WiringError("input modes must be distinct");
  }

  // Column k holds the mode amplitudes for input basis vector k.
  CMatrix amps = CMatrix::Zero(n_modes, n_in);
  for (Eigen::Index k = 0; k < n_in; ++k) {
    const Mode& m = setup.inputs[static_cast<std::size_t>(k)];
    amps(mode_index(m.path, m.pol), k) = 1.0;
  }
  std::vector<bool> absorbed(static_cast<std::size_t>(n_modes), false);

  Propagation out;
  for (const Element& el : setup.elements) {
    if (std::holds_alternative<Polarizer>(el))
      throw ContractError("propagate: a polarizer is lossy, the element chain is not unitary");
    if (const auto* d = std::get_if<Detector>(&el)) {
      detail::check_path(setup, d->path, "detector");
      if (d->label.empty()) throw WiringError("detector needs a label");
      const std::vector<Pol> pols = d->pol ? std::vector<Pol>{*d->pol} : std::vector<Pol>{Pol::v, Pol::h};
      for (Pol pol : pols) {
        const int idx = mode_index(d->path, pol);
        if (absorbed[static_cast<std::size_t>(idx)])
          throw WiringError("detector " + d->label + ": mode already absorbed");
        absorbed[static_cast<std::size_t>(idx)] = true;
        out.labels.push_back(d->label);
        out.rows.push_back(amps.row(idx).transpose());
        amps.row(idx).setZero();
      }
      continue;
    }
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, Hwp>) {
            detail::check_path(setup, e.path, "hwp");
          } else if constexpr (std::is_same_v<T, BeamSplitter>) {
            detail::check_pair(setup, e.p, e.q, "beam splitter");
            if (e.m.rows() != 2 || e.m.cols() != 2) throw ShapeError("beam splitter: matrix must be 2x2");
            if (UnitaryOperator::unitarity_defect(e.m) > tol)
              throw ContractError("beam splitter: matrix is not unitary");
          } else if constexpr (std::is_same_v<T, Pbs> || std::is_same_v<T, Ppc> || std::is_same_v<T, ReversePpc>) {
            detail::check_pair(setup, e.p, e.q, "pbs");
          }
        },
        el);
    for (Eigen::Index k = 0; k < n_in; ++k) {
      CVector a = amps.col(k);
      if (const auto* e = std::get_if<Hwp>(&el)) {
        detail::apply_hwp(a, e->path, e->theta);
      } else if (const auto* e = std::get_if<Pbs>(&el)) {
        detail::apply_pbs(a, e->p, e->q);
      } else if (const auto* e = std::get_if<BeamSplitter>(&el)) {
        detail::apply_coupler(a, e->p, e->q, e->m);
      } else if (const auto* e = std::get_if<Ppc>(&el)) {
        detail::apply_pbs(a, e->p, e->q);
        detail::apply_hwp(a, e->q, degrees(45.0));
      } else if (const auto* e = std::get_if<ReversePpc>(&el)) {
        detail::apply_hwp(a, e->p, degrees(45.0));
        detail::apply_pbs(a, e->p, e->q);
      }
      amps.col(k) = a;
    }
  }
  // Amplitude fed into an absorbed mode after its detector fired also ends up here.
  for (int idx = 0; idx < n_modes; ++idx)
    if (amps.row(idx).norm() > tol)
      throw WiringError("mode (path " + std::to_string(idx / 2) + ", " + to_string(static_cast<Pol>(idx % 2)) +
                        ") is not routed to a detector");
  return out;
}

/// POVM on the input modes; detectors sharing a label are merged. Labels keep first-appearance order.
inline Povm compile_setup(const OpticalSetup& setup, double tol = kTolerance) {
  const Propagation prop = propagate(setup, tol);
  const auto n_in = static_cast<Eigen::Index>(setup.inputs.size());
  std::vector<std::string> labels;
  std::vector<CMatrix> elements;
  for (std::size_t r = 0; r < prop.rows.size(); ++r) {
    auto it = std::find(labels.begin(), labels.end(), prop.labels[r]);
    if (it == labels.end()) {
      labels.push_back(prop.labels[r]);
      elements.push_back(CMatrix::Zero(n_in, n_in));
      it = labels.end() - 1;
    }
    // Pi[k][l] = sum conj(a_k) a_l, the absorbed-amplitude quadratic form.
    const CVector& a = prop.rows[r];
    elements[static_cast<std::size_t>(it - labels.begin())] += a.conjugate() * a.transpose();
  }
  return Povm(labels, elements, tol);
}

/// Largest operator-norm difference between elements with the same label.
inline double equivalence(const Povm& optical, const Povm& abstract) {
  if (optical.dim() != abstract.dim()) throw ContractError("equivalence: POVMs act on different dimensions");
  if (optical.size() != abstract.size()) throw ContractError("equivalence: outcome label sets differ");
  double worst = 0.0;
  for (const auto& label : optical.labels()) {
    if (!abstract.has(label)) throw ContractError("equivalence: outcome label sets differ at " + label);
    worst = std::max(worst, operator_norm(optical.element(label) - abstract.element(label)));
  }
  return worst;
}

// Built-in setups. Input modes are the marker (idler) basis in the order used by
// the abstract POVMs: (v, h) for the qubit marker, paths (i, ii, iii) for the qutrit.

/// Unambiguous discrimination of the two polarization markers.
inline OpticalSetup fig11_mud(double epsilon) {
  marker::check_two_path_epsilon(epsilon);
  if (epsilon == 0.5) throw DomainError("fig11_mud: the wave-plate constraint needs epsilon < 1/2");
  const double theta = hwp_angle_for_cos(std::sqrt(epsilon / (1.0 - epsilon)));
  OpticalSetup s;
  s.name = "fig11-mud";
  s.paths = 3;
  s.inputs = {{0, Pol::v}, {0, Pol::h}};
  s.elements = {Pbs{0, 1},
                Hwp{0, degrees(45.0)},
                Hwp{1, theta},
                Pbs{1, 2},
                Detector{1, Pol::h, "0"},
                BeamSplitter{0, 2, symmetric_beam_splitter()},
                Detector{0, std::nullopt, "A"},
                Detector{2, std::nullopt, "B"}};
  return s;
}

/// Minimum-error measurement: HWP at 22.5 degrees, then a PBS with A on h and B on v.
inline OpticalSetup fig12_mem(double epsilon) {
  marker::check_two_path_epsilon(epsilon);
  OpticalSetup s;
  s.name = "fig12-mem";
  s.paths = 2;
  s.inputs = {{0, Pol::v}, {0, Pol::h}};
  s.elements = {Hwp{0, degrees(22.5)}, Pbs{0, 1}, Detector{0, std::nullopt, "A"}, Detector{1, std::nullopt, "B"}};
  return s;
}

namespace detail {

// U1 acts on paths (ii, iii), U2 on (i, ii).
inline CMatrix u1_block() { return matrix({{-1, std::sqrt(2.0)}, {std::sqrt(2.0), 1}}) / std::sqrt(3.0); }
inline CMatrix u2_block() { return matrix({{1, 1}, {-1, 1}}) / std::sqrt(2.0); }

}  // namespace detail

/// Unambiguous discrimination of the idler path qutrit. Path 3 carries the vertical part of path iii
/// after the wave plate and PBS.
inline OpticalSetup fig15_mud3(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  if (epsilon == 1.0 / 3.0) throw DomainError("fig15_mud3: the wave-plate constraint needs epsilon < 1/3");
  const double theta = hwp_angle_for_cos(std::sqrt(epsilon / (1.0 - 2.0 * epsilon)));
  OpticalSetup s;
  s.name = "fig15-mud3";
  s.paths = 4;
  s.inputs = {{0, Pol::v}, {1, Pol::v}, {2, Pol::v}};
  s.elements = {Hwp{2, theta},
                Pbs{2, 3},
                Detector{2, std::nullopt, "0"},
                BeamSplitter{1, 3, detail::u1_block()},
                BeamSplitter{0, 1, detail::u2_block()},
                Detector{0, std::nullopt, "A"},
                Detector{1, std::nullopt, "B"},
                Detector{3, std::nullopt, "C"}};
  return s;
}

/// The same apparatus with the wave plate, PBS and inconclusive detector removed.
inline OpticalSetup fig15_mem3(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  OpticalSetup s;
  s.name = "fig15-mem3";
  s.paths = 3;
  s.inputs = {{0, Pol::v}, {1, Pol::v}, {2, Pol::v}};
  s.elements = {BeamSplitter{1, 2, detail::u1_block()},
                BeamSplitter{0, 1, detail::u2_block()},
                Detector{0, std::nullopt, "A"},
                Detector{1, std::nullopt, "B"},
                Detector{2, std::nullopt, "C"}};
  return s;
}

/// Orthogonal measurement telling which exit the signal reached. Labels are exits i, ii, iii.
inline OpticalSetup fig16_orthogonal(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  const double theta = hwp_angle_for_cos(std::sqrt(1.0 - 2.0 * epsilon));
  OpticalSetup s;
  s.name = "fig16-orthogonal";
  s.paths = 3;
  s.inputs = {{0, Pol::v}, {1, Pol::v}, {2, Pol::v}};
  s.elements = {Detector{0, std::nullopt, "iii"},
                ReversePpc{1, 2},
                Hwp{1, theta},
                Pbs{1, 2},
                Detector{2, std::nullopt, "ii"},
                Detector{1, std::nullopt, "i"}};
  return s;
}

inline const std::vector<std::string>& builtin_setup_names() {
  static const std::vector<std::string> names = {"fig11-mud", "fig12-mem", "fig15-mud3", "fig15-mem3",
                                                 "fig16-orthogonal"};
  return names;
}

inline OpticalSetup builtin_setup(const std::string& name, double epsilon) {
  if (name == "fig11-mud") return fig11_mud(epsilon);
  if (name == "fig12-mem") return fig12_mem(epsilon);
  if (name == "fig15-mud3") return fig15_mud3(epsilon);
  if (name == "fig15-mem3") return fig15_mem3(epsilon);
  if (name == "fig16-orthogonal") return fig16_orthogonal(epsilon);
  throw DomainError("unknown optical setup '" + name + "'");
}

/// Orthogonal measurement with the rows of U2 U1 as outcomes A, B, C.
inline Povm three_path_min_error_povm(double epsilon) {
  marker::check_three_path_epsilon(epsilon);
  const auto u = interferometer::standard_unitaries();
  const CMatrix w = u.u2.matrix() * u.u1.matrix();
  std::vector<CMatrix> el;
  for (int a = 0; a < 3; ++a) el.push_back(projector(w.row(a).adjoint()));
  return Povm({"A", "B", "C"}, el);
}

/// The abstract measurement a built-in setup is meant to realize.
inline Povm abstract_povm(const std::string& name, double epsilon) {
  if (name == "fig11-mud") return discrimination::ud2(epsilon).povm;
  if (name == "fig12-mem") return discrimination::two_path_min_error_povm(epsilon);
  if (name == "fig15-mud3") return discrimination::ud3(epsilon).povm;
  if (name == "fig15-mem3") return three_path_min_error_povm(epsilon);
  if (name == "fig16-orthogonal") return discrimination::exit_povm(epsilon).povm;
  throw DomainError("unknown optical setup '" + name + "'");
}

enum class PairKind { two_path, three_path };

/// Idler-signal pair state, idler factor first.
struct PairSourceState {
  PairKind kind = PairKind::two_path;
  double epsilon = 0.0;
  Eigen::Index idler_dim = 0;
  Eigen::Index signal_dim = 0;
  StateVector state;

  /// Amplitudes arranged as (idler, signal).
  CMatrix coefficients() const {
    CMatrix c(idler_dim, signal_dim);
    for (Eigen::Index i = 0; i < idler_dim; ++i)
      for (Eigen::Index s = 0; s < signal_dim; ++s) c(i, s) = state[i * signal_dim + s];
    return c;
  }

  Eigen::VectorXd schmidt_coefficients() const { return Eigen::JacobiSVD<CMatrix>(coefficients()).singularValues(); }
};

inline PairSourceState pair_source(PairKind kind, double epsilon) {
  const CVector v = column({1, 0});
  const CVector h = column({0, 1});
  if (kind == PairKind::two_path) {
    marker::check_two_path_epsilon(epsilon);
    // Polarization pair, then HWP at 22.5 degrees and the converter on the signal.
    CVector psi = std::sqrt(1.0 - epsilon) * kron(v, v) + std::sqrt(epsilon) * kron(h, h);
    psi = kron(identity(2), hwp(degrees(22.5)).matrix()) * psi;
    // Converter maps the signal (v, h) column to the path column (h, v).
    const CMatrix ppc = matrix({{0, 1}, {1, 0}});
    psi = kron(identity(2), ppc) * psi;
    return {kind, epsilon, 2, 2, StateVector(psi, true)};
  }

  marker::check_three_path_epsilon(epsilon);
  // Each photon lives in (direction k1/k2) x (v, h): index 2 k + pol.
  auto photon = [&](int k, const CVector& pol) { return kron(basis_vector(2, k), pol); };
  const double a = std::sqrt(epsilon / (1.0 - epsilon));
  const double b = std::sqrt((1.0 - 2.0 * epsilon) / (1.0 - epsilon));
  CVector psi = CVector::Zero(16);
  for (int k = 0; k < 2; ++k)
    psi += (a * kron(photon(k, v), photon(k, v)) + b * kron(photon(k, h), photon(k, h))) / std::sqrt(2.0);

  // Polarizer passing vertical on the signal's first direction.
  CMatrix polarizer = identity(4);
  polarizer(mode_index(0, Pol::h), mode_index(0, Pol::h)) = 0.0;
  psi = kron(identity(4), polarizer) * psi;
  psi /= psi.norm();

  // k1 stays on path i; the converter sends k2-vertical to path ii and k2-horizontal to path iii.
  CMatrix convert = CMatrix::Zero(3, 4);
  convert(0, mode_index(0, Pol::v)) = 1.0;
  convert(1, mode_index(1, Pol::v)) = 1.0;
  convert(2, mode_index(1, Pol::h)) = 1.0;
  const CVector out = kron(convert, convert) * psi;
  if (std::abs(out.squaredNorm() - 1.0) > kTolerance)
    throw ContractError("pair_source: amplitude left in an unconverted mode");
  return {kind, epsilon, 3, 3, StateVector(out, true)};
}

}  // namespace wps::optics
