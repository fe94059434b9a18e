#pragma once

// Dense complex linear algebra and quantum-state primitives shared by every
// other header. All dimensions in this project are small (<= a few hundred),
// so everything is dense and row-major.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "wps/errors.hpp"

namespace wps {

using Complex = std::complex<double>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Default tolerance for algebraic identities (double precision leaves ~1e-15).
inline constexpr double kTolerance = 1e-12;

/// Largest dimension a tensor product may produce.
inline constexpr std::size_t kMaxDimension = 4096;

inline constexpr Complex kI{0.0, 1.0};

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline CVector basis_vector(Eigen::Index n, Eigen::Index k) {
  CVector v = CVector::Zero(n);
  v(k) = 1.0;
  return v;
}

inline CVector column(std::initializer_list<Complex> entries) {
  CVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index k = 0;
  for (const auto& e : entries) v(k++) = e;
  return v;
}

inline CMatrix matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.begin()->size());
  CMatrix m(n_rows, n_cols);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n_cols) throw ShapeError("ragged matrix literal");
    Eigen::Index c = 0;
    for (const auto& e : row) m(r, c++) = e;
    ++r;
  }
  return m;
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) return false;
  return true;
}

template <class A, class B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

/// Kronecker product; the left factor is the slow index.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline CMatrix outer(const CVector& a, const CVector& b) { return a * b.adjoint(); }

inline CMatrix projector(const CVector& v) { return outer(v, v); }

inline double hermiticity_defect(const CMatrix& m) { return max_abs_diff(m, CMatrix(m.adjoint())); }

/// Eigenvalues (ascending) of the Hermitian part of m. Hermiticity must be checked by the caller.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Largest singular value.
inline double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

inline double commutator_norm(const CMatrix& a, const CMatrix& b) {
  const CMatrix c = a * b - b * a;
  return c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
}

/// Column of probability amplitudes. Unnormalized vectors are first-class:
/// their squared norm is the statistical weight of what they describe.
class StateVector {
 public:
  StateVector() = default;

  explicit StateVector(CVector amps, bool normalized = false, double tol = kTolerance)
      : amps_(std::move(amps)), normalized_(normalized) {
    if (amps_.size() == 0) throw ShapeError("StateVector: empty");
    if (!all_finite(amps_)) throw ContractError("StateVector: non-finite amplitude");
    if (normalized_ && std::abs(weight() - 1.0) > tol)
      throw ContractError("StateVector: flagged normalized but squared norm is " + std::to_string(weight()));
  }

  Eigen::Index dim() const { return amps_.size(); }
  const CVector& amps() const { return amps_; }
  Complex operator[](Eigen::Index k) const { return amps_(k); }
  bool normalized() const { return normalized_; }
  double weight() const { return amps_.squaredNorm(); }

  StateVector normalized_copy() const {
    const double w = weight();
    if (w <= 0.0) throw DomainError("StateVector: cannot normalize a zero vector");
    return StateVector(amps_ / std::sqrt(w), true);
  }

 private:
  CVector amps_;
  bool normalized_ = false;
};

/// Statistical operator. Trace need not be one; it carries the ensemble weight.
class DensityOperator {
 public:
  DensityOperator() = default;

  explicit DensityOperator(CMatrix m, double tol = kTolerance) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) throw ShapeError("DensityOperator: not square");
    if (!all_finite(m_)) throw ContractError("DensityOperator: non-finite entry");
    if (hermiticity_defect(m_) > tol) throw ContractError("DensityOperator: not Hermitian");
    if (hermitian_eigenvalues(m_).minCoeff() < -tol)
      throw ContractError("DensityOperator: negative eigenvalue");
    if (trace() <= 0.0) throw ContractError("DensityOperator: trace must be positive");
  }

  static DensityOperator pure(const StateVector& v) { return DensityOperator(projector(v.amps())); }

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double purity() const { return (m_ * m_).trace().real() / (trace() * trace()); }

  DensityOperator normalized() const { return DensityOperator(m_ / trace()); }

 private:
  CMatrix m_;
};

class UnitaryOperator {
 public:
  UnitaryOperator() = default;

  explicit UnitaryOperator(CMatrix m, double tol = kTolerance) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) throw ShapeError("UnitaryOperator: not square");
    if (!all_finite(m_)) throw ContractError("UnitaryOperator: non-finite entry");
    if (unitarity_defect(m_) > tol) throw ContractError("UnitaryOperator: U^dagger U != 1");
  }

  static double unitarity_defect(const CMatrix& m) {
    return max_abs_diff(CMatrix(m.adjoint() * m), identity(m.cols()));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

  UnitaryOperator operator*(const UnitaryOperator& rhs) const {
    return UnitaryOperator(CMatrix(m_ * rhs.m_));
  }

 private:
  CMatrix m_;
};

/// Finite family of labelled positive operators summing to the identity.
class Povm {
 public:
  Povm() = default;

  Povm(std::vector<std::string> labels, std::vector<CMatrix> elements, double tol = kTolerance)
      : labels_(std::move(labels)), elements_(std::move(elements)) {
    if (labels_.empty() || labels_.size() != elements_.size())
      throw ContractError("Povm: need one element per label");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t j = i + 1; j < labels_.size(); ++j)
        if (labels_[i] == labels_[j]) throw ContractError("Povm: duplicate label " + labels_[i]);
    const Eigen::Index d = elements_.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      const CMatrix& e = elements_[k];
      if (e.rows() != d || e.cols() != d) throw ShapeError("Povm: element dimensions differ");
      if (!all_finite(e)) throw ContractError("Povm: non-finite element " + labels_[k]);
      if (hermiticity_defect(e) > tol) throw ContractError("Povm: element " + labels_[k] + " not Hermitian");
      if (hermitian_eigenvalues(e).minCoeff() < -tol)
        throw ContractError("Povm: element " + labels_[k] + " not positive");
      sum += e;
    }
    completeness_defect_ = max_abs_diff(sum, identity(d));
    if (completeness_defect_ > tol) throw ContractError("Povm: elements do not sum to the identity");
  }

  Eigen::Index dim() const { return elements_.front().rows(); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<CMatrix>& elements() const { return elements_; }
  double completeness_defect() const { return completeness_defect_; }

  bool has(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  const CMatrix& element(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw ContractError("Povm: no outcome labelled " + label);
    return elements_[static_cast<std::size_t>(it - labels_.begin())];
  }

 private:
  std::vector<std::string> labels_;
  std::vector<CMatrix> elements_;
  double completeness_defect_ = 0.0;
};

/// Outcome label -> probability, in the order the outcomes were produced.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;

  void set(const std::string& label, double p) {
    for (auto& [l, v] : entries_)
      if (l == label) {
        v = p;
        return;
      }
    entries_.emplace_back(label, p);
  }

  double at(const std::string& label) const {
    for (const auto& [l, v] : entries_)
      if (l == label) return v;
    throw ContractError("ProbabilityMap: no outcome labelled " + label);
  }

  bool has(const std::string& label) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == label; });
  }

  double sum() const {
    return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                           [](double acc, const auto& e) { return acc + e.second; });
  }

  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

inline StateVector tensor_product(const StateVector& a, const StateVector& b,
                                  std::size_t max_dim = kMaxDimension) {
  const auto dim = static_cast<std::size_t>(a.dim()) * static_cast<std::size_t>(b.dim());
  if (dim > max_dim)
    throw CapacityError("tensor_product: dimension " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(max_dim));
  return StateVector(kron(a.amps(), b.amps()), a.normalized() && b.normalized());
}

inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b,
                                      std::size_t max_dim = kMaxDimension) {
  const auto dim = static_cast<std::size_t>(a.dim()) * static_cast<std::size_t>(b.dim());
  if (dim > max_dim) throw CapacityError("tensor_product: dimension exceeds cap");
  return DensityOperator(kron(a.matrix(), b.matrix()));
}

/// Reduced operator of factor `keep` for an operator on dims[0] (x) dims[1] (x) ...
/// The first factor is the slowest index.
inline CMatrix partial_trace(const CMatrix& rho, const std::vector<Eigen::Index>& dims, std::size_t keep) {
  if (keep >= dims.size()) throw ShapeError("partial_trace: keep index out of range");
  Eigen::Index total = 1;
  for (auto d : dims) {
    if (d <= 0) throw ShapeError("partial_trace: factor dimensions must be positive");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw ShapeError("partial_trace: factor dimensions do not match operator dimension");

  Eigen::Index stride = 1;
  for (std::size_t k = keep + 1; k < dims.size(); ++k) stride *= dims[k];
  const Eigen::Index dk = dims[keep];
  const Eigen::Index outer_count = total / (dk * stride);

  CMatrix out = CMatrix::Zero(dk, dk);
  // Row index = (o * dk + i) * stride + s; traced indices o and s must agree between row and column.
  for (Eigen::Index o = 0; o < outer_count; ++o)
    for (Eigen::Index s = 0; s < stride; ++s)
      for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index j = 0; j < dk; ++j)
          out(i, j) += rho((o * dk + i) * stride + s, (o * dk + j) * stride + s);
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Eigen::Index>& dims,
                                     std::size_t keep) {
  return DensityOperator(partial_trace(rho.matrix(), dims, keep));
}

namespace detail {
inline double clamp_probability(double p, const std::string& label, double tol) {
  if (p < -tol) throw ContractError("born: negative probability for outcome " + label);
  return p < 0.0 ? 0.0 : p;
}
}  // namespace detail

/// Born-rule probabilities tr(Pi rho); they sum to tr(rho).
inline ProbabilityMap born(const DensityOperator& state, const Povm& povm, double tol = kTolerance) {
  if (state.dim() != povm.dim()) throw ShapeError("born: state and POVM dimensions differ");
  ProbabilityMap out;
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const double p = (povm.elements()[k] * state.matrix()).trace().real();
    out.set(povm.labels()[k], detail::clamp_probability(p, povm.labels()[k], tol));
  }
  return out;
}

inline ProbabilityMap born(const StateVector& state, const Povm& povm, double tol = kTolerance) {
  if (state.dim() != povm.dim()) throw ShapeError("born: state and POVM dimensions differ");
  ProbabilityMap out;
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const double p = state.amps().dot(povm.elements()[k] * state.amps()).real();
    out.set(povm.labels()[k], detail::clamp_probability(p, povm.labels()[k], tol));
  }
  return out;
}

inline StateVector apply_unitary(const UnitaryOperator& u, const StateVector& state) {
  if (u.dim() != state.dim()) throw ShapeError("apply_unitary: dimension mismatch");
  return StateVector(u.matrix() * state.amps(), state.normalized());
}

inline DensityOperator apply_unitary(const UnitaryOperator& u, const DensityOperator& state) {
  if (u.dim() != state.dim()) throw ShapeError("apply_unitary: dimension mismatch");
  return DensityOperator(CMatrix(u.matrix() * state.matrix() * u.matrix().adjoint()));
}

}  // namespace wps
