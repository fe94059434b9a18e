#pragma once

// Three-path interferometer: beam-splitter network, forward and backward
// states, weak values of the path projectors, and the marked transfer
// operators obtained when checkpoint interactions entangle the path with
// marker degrees of freedom.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wps/qcore.hpp"

namespace wps::interferometer {

inline constexpr int kPaths = 3;
inline constexpr int kStages = 4;

enum class Path { i = 0, ii = 1, iii = 2 };

enum class Checkpoint { A = 0, B = 1, C = 2, E = 3, F = 4 };

inline const char* to_string(Checkpoint c) {
  static constexpr const char* names[] = {"A", "B", "C", "E", "F"};
  return names[static_cast<int>(c)];
}

/// Which beam splitters are in place, link phases at A, B, C, and blocked links.
struct NetworkConfig {
  std::array<bool, 4> present{true, true, true, true};
  /// Absent BS3/BS4 are replaced by the permutations that route each path to its own detector.
  bool replacement_mode = true;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  /// Blocks the links through checkpoints A, B, C (path iii is the C -> BS4 link).
  std::array<bool, 3> blocked{false, false, false};

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
      throw DomainError("NetworkConfig: link phases must be finite");
  }
};

struct StandardUnitaries {
  UnitaryOperator u1, u2, u3, u4;
};

inline StandardUnitaries standard_unitaries() {
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const CMatrix outer = matrix({{r3, 0, 0}, {0, -1, r2}, {0, r2, 1}}) / r3;
  const CMatrix inner = matrix({{1, 1, 0}, {-1, 1, 0}, {0, 0, r2}}) / r2;
  return {UnitaryOperator(outer), UnitaryOperator(inner), UnitaryOperator(inner), UnitaryOperator(outer)};
}

/// Permutations standing in for removed BS3 and BS4 in the path-verification setup.
inline CMatrix replacement_u3() { return matrix({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}); }
inline CMatrix replacement_u4() { return matrix({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}); }

/// Effective matrix of beam splitter `index` (1..4) under `config`.
inline CMatrix beam_splitter(const NetworkConfig& config, int index) {
  if (index < 1 || index > kStages) throw DomainError("beam_splitter: index must be 1..4");
  const auto u = standard_unitaries();
  if (config.present[static_cast<std::size_t>(index - 1)]) {
    switch (index) {
      case 1: return u.u1.matrix();
      case 2: return u.u2.matrix();
      case 3: return u.u3.matrix();
      default: return u.u4.matrix();
    }
  }
  if (config.replacement_mode && index == 3) return replacement_u3();
  if (config.replacement_mode && index == 4) return replacement_u4();
  return identity(kPaths);
}

/// Diagonal layer at checkpoints A, B, C: link phases and blocked links.
inline CMatrix checkpoint_layer(const NetworkConfig& config) {
  const std::array<double, 3> phases{config.alpha, config.beta, config.gamma};
  CMatrix d = CMatrix::Zero(kPaths, kPaths);
  for (int p = 0; p < kPaths; ++p)
    if (!config.blocked[static_cast<std::size_t>(p)]) d(p, p) = std::polar(1.0, phases[static_cast<std::size_t>(p)]);
  return d;
}

/// Matrix taking the stage k-1 amplitudes to stage k. Stage 2 includes the checkpoint layer.
inline CMatrix stage_matrix(const NetworkConfig& config, int k) {
  const CMatrix bs = beam_splitter(config, k);
  return k == 2 ? CMatrix(checkpoint_layer(config) * bs) : bs;
}

/// Product of stage matrices from stage `from` to stage `to` (from <= to).
inline CMatrix transfer(const NetworkConfig& config, int from, int to) {
  if (from < 0 || to > kStages || from > to) throw DomainError("transfer: need 0 <= from <= to <= 4");
  config.validate();
  CMatrix t = identity(kPaths);
  for (int k = from + 1; k <= to; ++k) t = stage_matrix(config, k) * t;
  return t;
}

inline CVector source_column() { return basis_vector(kPaths, 2); }
inline CVector detector_column() { return basis_vector(kPaths, 2); }

/// Path amplitudes after `stage` beam splitters, starting from the source on path iii.
/// Blocked links drop weight; nothing is renormalized.
inline StateVector forward_state(const NetworkConfig& config, int stage) {
  return StateVector(transfer(config, 0, stage) * source_column());
}

/// Column whose adjoint is the detector row propagated back to `stage`.
inline StateVector backward_state(const NetworkConfig& config, int stage) {
  const CMatrix t = transfer(config, stage, kStages);
  return StateVector(t.adjoint() * detector_column());
}

/// Position of the projector in U4 U3 U2 U1: 0 puts it at the far left (all act right).
class Split {
 public:
  explicit Split(int index) : index_(index) {
    if (index < 0 || index > kStages) throw DomainError("Split: index must be 0..4");
  }
  int index() const { return index_; }
  int forward_stage() const { return kStages - index_; }

 private:
  int index_;
};

struct WeakValueTriple {
  Complex w_i, w_ii, w_iii;

  Complex operator[](int p) const { return p == 0 ? w_i : (p == 1 ? w_ii : w_iii); }
  Complex sum() const { return w_i + w_ii + w_iii; }
};

/// Normalized matrix elements <bwd|P_k|fwd>/<bwd|fwd> for each path projector P_k.
inline std::vector<Complex> path_weak_values(const CVector& bwd, const CVector& fwd, double tol = kTolerance) {
  if (bwd.size() != fwd.size()) throw ShapeError("path_weak_values: dimension mismatch");
  const Complex overlap = bwd.dot(fwd);
  if (std::abs(overlap) <= tol)
    throw SingularPostselectionError("weak values undefined: post-selection amplitude vanishes");
  std::vector<Complex> out;
  for (Eigen::Index k = 0; k < fwd.size(); ++k) out.push_back(std::conj(bwd(k)) * fwd(k) / overlap);
  return out;
}

inline WeakValueTriple weak_values(Split split, const NetworkConfig& config = {}) {
  const int stage = split.forward_stage();
  const auto w = path_weak_values(backward_state(config, stage).amps(), forward_state(config, stage).amps());
  return {w[0], w[1], w[2]};
}

// ---------------------------------------------------------------------------
// Marked interferometer

/// Local checkpoint operators A, B, C, E, F and their (uncorrelated) initial states.
struct LocalMarkers {
  std::array<CMatrix, 5> ops;
  std::array<CMatrix, 5> states;

  const CMatrix& op(Checkpoint c) const { return ops[static_cast<std::size_t>(c)]; }
  const CMatrix& state(Checkpoint c) const { return states[static_cast<std::size_t>(c)]; }

  Complex expectation(Checkpoint c) const { return (op(c) * state(c)).trace(); }

  std::vector<Eigen::Index> dims() const {
    std::vector<Eigen::Index> d;
    for (const auto& s : states) d.push_back(s.rows());
    return d;
  }

  void validate(double tol = kTolerance) const {
    for (std::size_t k = 0; k < 5; ++k) {
      const auto name = std::string(to_string(static_cast<Checkpoint>(k)));
      if (ops[k].rows() != states[k].rows()) throw ShapeError("LocalMarkers: operator/state size differ at " + name);
      UnitaryOperator(ops[k], tol);
      DensityOperator(states[k], tol);
      if (std::abs(DensityOperator(states[k]).trace() - 1.0) > tol)
        throw ContractError("LocalMarkers: initial state at " + name + " is not normalized");
    }
  }

  /// One qubit per checkpoint, all operators the identity.
  static LocalMarkers trivial() {
    LocalMarkers m;
    for (std::size_t k = 0; k < 5; ++k) {
      m.ops[k] = identity(2);
      m.states[k] = projector(basis_vector(2, 0));
    }
    return m;
  }

  /// Pointer qubits at A, B, C turned from |0> to sqrt(1-3e)|0> + sqrt(3e)|1>; E = F = 1.
  static LocalMarkers symmetric(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0 / 3.0)) throw DomainError("symmetric markers need 0 <= epsilon <= 1/3");
    const double c = std::sqrt(1.0 - 3.0 * epsilon);
    const double s = std::sqrt(3.0 * epsilon);
    LocalMarkers m = trivial();
    const CMatrix rot = matrix({{c, -s}, {s, c}});
    m.ops[0] = m.ops[1] = m.ops[2] = rot;
    return m;
  }
};

/// Checkpoint operators on the full marker space together with the initial marker state.
struct CheckpointMarkers {
  std::array<CMatrix, 5> ops;
  DensityOperator rho;

  Eigen::Index dim() const { return rho.dim(); }
  const CMatrix& op(Checkpoint c) const { return ops[static_cast<std::size_t>(c)]; }
};

/// Embeds each local operator as 1 (x) ... (x) X (x) ... (x) 1 in the order A, B, C, E, F.
inline CheckpointMarkers to_full(const LocalMarkers& local) {
  local.validate();
  CheckpointMarkers full;
  for (std::size_t k = 0; k < 5; ++k) {
    CMatrix op = identity(1);
    for (std::size_t j = 0; j < 5; ++j) op = kron(op, j == k ? local.ops[j] : identity(local.states[j].rows()));
    full.ops[k] = op;
  }
  CMatrix rho = identity(1);
  for (const auto& s : local.states) rho = kron(rho, s);
  full.rho = DensityOperator(rho);
  return full;
}

/// 3x3 grid of marker-space operators, stored as one (3 d) x (3 d) matrix, path index slowest.
struct OperatorMatrix {
  Eigen::Index marker_dim = 1;
  CMatrix full;

  CMatrix entry(int row, int col) const {
    return full.block(row * marker_dim, col * marker_dim, marker_dim, marker_dim);
  }
};

struct MarkedTransfer {
  OperatorMatrix overall;
  /// Amplitude operator from the source to detector D.
  CMatrix t_fin;
  /// Amplitude operator from the source to checkpoint F.
  CMatrix t_f;
};

/// Path-diagonal layer diag(x0, x1, x2) with marker-operator entries.
inline CMatrix operator_layer(const CMatrix& x0, const CMatrix& x1, const CMatrix& x2) {
  const Eigen::Index d = x0.rows();
  CMatrix out = CMatrix::Zero(3 * d, 3 * d);
  out.block(0, 0, d, d) = x0;
  out.block(d, d, d, d) = x1;
  out.block(2 * d, 2 * d, d, d) = x2;
  return out;
}

/// The seven factors of the marked network, in order of application:
/// U1, E-layer, U2, (A,B,C)-layer, U3, F-layer, U4.
inline std::array<CMatrix, 7> marked_factors(const CheckpointMarkers& markers, const NetworkConfig& config = {}) {
  const Eigen::Index d = markers.dim();
  const CMatrix one = identity(d);
  const CMatrix layer = checkpoint_layer(config);
  auto lift = [&](const CMatrix& path_matrix) { return kron(path_matrix, one); };
  return {lift(beam_splitter(config, 1)),
          operator_layer(one, markers.op(Checkpoint::E), one),
          lift(beam_splitter(config, 2)),
          operator_layer(layer(0, 0) * markers.op(Checkpoint::A), layer(1, 1) * markers.op(Checkpoint::B),
                         layer(2, 2) * markers.op(Checkpoint::C)),
          lift(beam_splitter(config, 3)),
          operator_layer(one, markers.op(Checkpoint::F), one),
          lift(beam_splitter(config, 4))};
}

inline void check_commuting(const CheckpointMarkers& markers, double tol = kTolerance) {
  for (std::size_t a = 0; a < 5; ++a) {
    UnitaryOperator(markers.ops[a], tol);
    for (std::size_t b = a + 1; b < 5; ++b)
      if (commutator_norm(markers.ops[a], markers.ops[b]) > tol)
        throw ContractError(std::string("marker operators ") + to_string(static_cast<Checkpoint>(a)) + " and " +
                            to_string(static_cast<Checkpoint>(b)) + " do not commute");
  }
}

inline MarkedTransfer marked_transfer(const CheckpointMarkers& markers, const NetworkConfig& config = {}) {
  check_commuting(markers);
  config.validate();
  const auto factors = marked_factors(markers, config);
  const Eigen::Index d = markers.dim();

  CMatrix total = identity(3 * d);
  for (const auto& f : factors) total = f * total;

  // Checkpoint F sits on path ii between BS3 and BS4.
  CMatrix up_to_f = identity(3 * d);
  for (std::size_t k = 0; k < 5; ++k) up_to_f = factors[k] * up_to_f;

  MarkedTransfer out;
  out.overall = OperatorMatrix{d, total};
  out.t_fin = out.overall.entry(2, 2);
  out.t_f = up_to_f.block(1 * d, 2 * d, d, d);
  return out;
}

/// <T_fin^dagger T_fin>: probability that detector D fires.
inline double detection_probability(const CheckpointMarkers& markers, const NetworkConfig& config = {}) {
  const auto t = marked_transfer(markers, config);
  return (t.t_fin * markers.rho.matrix() * t.t_fin.adjoint()).trace().real();
}

/// <T_F^dagger T_F>: probability that the particle reaches checkpoint F.
inline double loop_probability(const CheckpointMarkers& markers) {
  const auto t = marked_transfer(markers);
  return (t.t_f * markers.rho.matrix() * t.t_f.adjoint()).trace().real();
}

/// Normalized marker state conditioned on detection by D.
inline DensityOperator final_marker_state(const CheckpointMarkers& markers, const NetworkConfig& config = {}) {
  const auto t = marked_transfer(markers, config);
  const CMatrix unnormalized = t.t_fin * markers.rho.matrix() * t.t_fin.adjoint();
  const double p = unnormalized.trace().real();
  if (p <= 0.0) throw DomainError("final_marker_state: detector D never fires");
  return DensityOperator(CMatrix(unnormalized / p));
}

/// epsilon from the loop markers alone: 1/3 - Re(<A>* <B>)/3.
inline double marker_epsilon(const LocalMarkers& m) {
  return (1.0 - std::real(std::conj(m.expectation(Checkpoint::A)) * m.expectation(Checkpoint::B))) / 3.0;
}

/// Detection probability from single-checkpoint expectation values.
inline double detection_probability_closed_form(const LocalMarkers& m) {
  const double eps = marker_epsilon(m);
  const Complex cross = (m.expectation(Checkpoint::A) - m.expectation(Checkpoint::B)) *
                        std::conj(m.expectation(Checkpoint::C)) * m.expectation(Checkpoint::E) *
                        m.expectation(Checkpoint::F);
  return (1.0 + 6.0 * eps) / 9.0 - 2.0 / 9.0 * cross.real();
}

namespace detail {
inline CMatrix hermitian_part(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }
}  // namespace detail

/// Reduced marker state of one checkpoint after detection by D, from expectation values only.
/// Valid for any factorized markers; A and B have no reduced state of their own here.
inline DensityOperator conditional_marker_state(const LocalMarkers& m, Checkpoint which) {
  m.validate();
  const double eps = marker_epsilon(m);
  const double norm = 9.0 * detection_probability_closed_form(m);
  if (norm <= 0.0) throw DomainError("conditional_marker_state: detector D never fires");
  const Complex a = m.expectation(Checkpoint::A);
  const Complex b = m.expectation(Checkpoint::B);
  const Complex c = m.expectation(Checkpoint::C);
  const Complex e = m.expectation(Checkpoint::E);
  const Complex f = m.expectation(Checkpoint::F);
  const CMatrix& x = m.op(which);
  const CMatrix& rho = m.state(which);
  CMatrix out;
  switch (which) {
    case Checkpoint::E:
      out = rho + 6.0 * eps * x * rho * x.adjoint() - 2.0 * detail::hermitian_part(x * rho * ((a - b) * std::conj(c) * f));
      break;
    case Checkpoint::F:
      out = rho + 6.0 * eps * x * rho * x.adjoint() - 2.0 * detail::hermitian_part(x * rho * ((a - b) * std::conj(c) * e));
      break;
    case Checkpoint::C:
      out = x * rho * x.adjoint() + 6.0 * eps * rho - 2.0 * detail::hermitian_part(rho * x.adjoint() * ((a - b) * e * f));
      break;
    default:
      throw ContractError("conditional_marker_state: checkpoint must be C, E or F");
  }
  return DensityOperator(CMatrix(out / norm));
}

/// Same reduced state, obtained by evolving the full joint state and tracing out the other markers.
inline DensityOperator conditional_marker_state_traced(const LocalMarkers& m, Checkpoint which) {
  const auto full = to_full(m);
  const auto rho_fin = final_marker_state(full);
  return partial_trace(rho_fin, m.dims(), static_cast<std::size_t>(which));
}

/// Reduced state for markers calibrated to <A> = <B> = sqrt(1 - 3 epsilon).
inline DensityOperator calibrated_conditional_state(const CMatrix& rho, const CMatrix& x, Checkpoint which,
                                                    double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0 / 3.0))
    throw DomainError("calibrated_conditional_state: epsilon must lie in [0, 1/3]");
  const double w = 6.0 * epsilon;
  switch (which) {
    case Checkpoint::E:
    case Checkpoint::F:
      return DensityOperator(CMatrix((rho + w * x * rho * x.adjoint()) / (1.0 + w)));
    case Checkpoint::C:
      return DensityOperator(CMatrix((x * rho * x.adjoint() + w * rho) / (1.0 + w)));
    default:
      throw ContractError("calibrated_conditional_state: checkpoint must be C, E or F");
  }
}

/// Net amplitude e^{i phi}(e^{i alpha} - e^{i beta}) with which E acts when A, B, F are pure phases.
inline Complex net_loop_amplitude(double alpha, double beta, double phi) {
  return 2.0 * kI * std::polar(1.0, phi + 0.5 * (alpha + beta)) * std::sin(0.5 * (alpha - beta));
}

// ---------------------------------------------------------------------------
// Identity checks

struct IdentityCheck {
  std::string name;
  double deviation = 0.0;

  bool pass(double tol = kTolerance) const { return deviation <= tol; }
};

/// Explicit product U4 U3 U2 U1.
inline CMatrix overall_unitary_literal() {
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  return matrix({{0, -r3, r6}, {r3, 2, r2}, {-r6, r2, 1}}) / 3.0;
}

/// Checks the three factorizations of U4 U3 U2 U1 and the five bra-ket products equal to 1/3.
inline std::vector<IdentityCheck> verify_splits() {
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  const NetworkConfig net;
  const auto u = standard_unitaries();
  const CMatrix total = overall_unitary_literal();
  std::vector<IdentityCheck> out;

  out.push_back({"U4 U3 U2 U1 literal", max_abs_diff(transfer(net, 0, 4), total)});

  struct Factorization {
    std::string name;
    int cut;
    CMatrix left, right;
  };
  const std::vector<Factorization> factorizations = {
      {"U4 (U3 U2 U1)", 3, u.u4.matrix(), matrix({{0, -1, r2}, {-r3, 0, 0}, {0, r2, 1}}) / r3},
      {"(U4 U3)(U2 U1)", 2, matrix({{r3, r3, 0}, {1, -1, 2}, {-r2, r2, r2}}) / r6,
       matrix({{r3, -1, r2}, {-r3, -1, r2}, {0, 2, r2}}) / r6},
      {"(U4 U3 U2) U1", 1, matrix({{0, r3, 0}, {1, 0, r2}, {-r2, 0, 1}}) / r3, u.u1.matrix()},
  };
  for (const auto& f : factorizations) {
    const double dev = std::max({max_abs_diff(f.left, transfer(net, f.cut, 4)),
                                 max_abs_diff(f.right, transfer(net, 0, f.cut)),
                                 max_abs_diff(CMatrix(f.left * f.right), total)});
    out.push_back({"factorization " + f.name, dev});
  }

  // Explicit (bwd, fwd) columns for stages 4, 3, 2, 1, 0.
  const std::array<std::pair<CVector, CVector>, 5> literal_pairs = {{
      {column({0, 0, 1}), column({r6, r2, 1}) / 3.0},
      {column({0, r2, 1}) / r3, column({r2, 0, 1}) / r3},
      {column({-1, 1, 1}) / r3, column({1, 1, 1}) / r3},
      {column({-r2, 0, 1}) / r3, column({0, r2, 1}) / r3},
      {column({-r6, r2, 1}) / 3.0, column({0, 0, 1})},
  }};
  for (int k = 0; k < 5; ++k) {
    const int stage = kStages - k;
    const auto& [bwd, fwd] = literal_pairs[static_cast<std::size_t>(k)];
    const CVector f = forward_state(net, stage).amps();
    const CVector b = backward_state(net, stage).amps();
    const double dev = std::max({max_abs_diff(f, fwd), max_abs_diff(b, bwd), std::abs(b.dot(f) - 1.0 / 3.0),
                                 std::abs(bwd.dot(fwd) - 1.0 / 3.0)});
    out.push_back({"inner product at stage " + std::to_string(stage), dev});
  }

  double unit_sum = 0.0;
  for (int s = 0; s <= kStages; ++s) unit_sum = std::max(unit_sum, std::abs(weak_values(Split(s)).sum() - 1.0));
  out.push_back({"weak-value unit sum", unit_sum});
  return out;
}

/// Bra (operator row) and ket (operator column) on either side of cut `c` (0..7) of the marked network.
inline std::pair<CMatrix, CMatrix> operator_bra_ket(const CheckpointMarkers& markers, int cut) {
  const auto factors = marked_factors(markers);
  const Eigen::Index d = markers.dim();
  CMatrix ket = identity(3 * d);
  CMatrix bra = identity(3 * d);
  for (int k = 0; k < 7; ++k) {
    if (k < 7 - cut)
      ket = factors[static_cast<std::size_t>(k)] * ket;
    else
      bra = factors[static_cast<std::size_t>(k)] * bra;
  }
  return {bra.block(2 * d, 0, d, 3 * d), ket.block(0, 2 * d, 3 * d, d)};
}

/// The eight ways of evaluating the operator-valued amplitude (1/3)[C + F(B - A)E],
/// each compared with the explicit bra/ket columns and with the closed form.
inline std::vector<IdentityCheck> verify_operator_factorizations(const CheckpointMarkers& markers) {
  check_commuting(markers);
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  const Eigen::Index d = markers.dim();
  const CMatrix one = identity(d);
  const CMatrix& A = markers.op(Checkpoint::A);
  const CMatrix& B = markers.op(Checkpoint::B);
  const CMatrix& C = markers.op(Checkpoint::C);
  const CMatrix& E = markers.op(Checkpoint::E);
  const CMatrix& F = markers.op(Checkpoint::F);
  const CMatrix zero = CMatrix::Zero(d, d);
  const CMatrix loop = F * (B - A) * E;
  const CMatrix expected = (C + loop) / 3.0;

  auto stack_col = [&](const CMatrix& x0, const CMatrix& x1, const CMatrix& x2) {
    CMatrix m(3 * d, d);
    m << x0, x1, x2;
    return m;
  };
  auto stack_row = [&](const CMatrix& x0, const CMatrix& x1, const CMatrix& x2) {
    CMatrix m(d, 3 * d);
    m << x0, x1, x2;
    return m;
  };

  // Indexed by the number of factors on the bra side.
  const std::array<std::pair<CMatrix, CMatrix>, 8> literal = {{
      {stack_row(zero, zero, one), stack_col(r6 * (B + A) * E, r2 * (2.0 * C - loop), 2.0 * (C + loop)) / 6.0},
      {stack_row(zero, r2 * one, one) / r3, stack_col((B + A) * E, F * (B - A) * E, r2 * C) / r6},
      {stack_row(zero, r2 * F, one) / r3, stack_col((B + A) * E, (B - A) * E, r2 * C) / r6},
      {stack_row(-F, F, one) / r3, stack_col(A * E, B * E, C) / r3},
      {stack_row(-F * A, F * B, C) / r3, stack_col(E, E, one) / r3},
      {stack_row(-F * (B + A), F * (B - A), r2 * C) / r6, stack_col(zero, r2 * E, one) / r3},
      {stack_row(-F * (B + A), F * (B - A) * E, r2 * C) / r6, stack_col(zero, r2 * one, one) / r3},
      {stack_row(-r6 * F * (B + A), r2 * (2.0 * C - loop), 2.0 * (C + loop)) / 6.0, stack_col(zero, zero, one)},
  }};

  std::vector<IdentityCheck> out;
  for (int cut = 0; cut < 8; ++cut) {
    const auto [bra, ket] = operator_bra_ket(markers, cut);
    const auto& [lit_bra, lit_ket] = literal[static_cast<std::size_t>(cut)];
    const double dev = std::max({max_abs_diff(bra, lit_bra), max_abs_diff(ket, lit_ket),
                                 max_abs_diff(CMatrix(bra * ket), expected),
                                 max_abs_diff(CMatrix(lit_bra * lit_ket), expected)});
    out.push_back({"operator inner product, cut " + std::to_string(cut), dev});
  }
  return out;
}

}  // namespace wps::interferometer
