#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wps/marker.hpp"
#include "wps/subensemble.hpp"

using namespace wps;
using namespace wps::marker;

namespace {

const std::vector<double> kGrid = {0.01, 0.04, 0.1, 1.0 / 3.0};

/// Marker states realised as three pointer qubits turned by angle t at A, B, C respectively,
/// with sin^2 t chosen so that pairwise overlaps are 1 - 3 epsilon.
CMatrix pointer_product_gram(double e) {
  const CVector zero = column({1, 0});
  const CVector one = column({0, 1});
  const CVector turned = std::sqrt(1 - 3 * e) * zero + std::sqrt(3 * e) * one;
  std::array<CVector, 3> s;
  for (int a = 0; a < 3; ++a) {
    CVector v = CVector::Ones(1);
    for (int k = 0; k < 3; ++k) v = kron(v, k == a ? turned : zero);
    s[a] = v;
  }
  CMatrix g(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) g(a, b) = s[a].dot(s[b]);
  return g;
}

}  // namespace

TEST(BuildFamily, Unmarked) {
  const auto f = build_family(0.0);
  for (int a = 0; a < 3; ++a) EXPECT_LE(max_abs_diff(f.state(a).amps, basis_vector(3, 2)), 1e-15);
  EXPECT_LE(max_abs_diff(f.psi.amps, basis_vector(4, 2)), 1e-15);
}

TEST(BuildFamily, ExplicitColumns) {
  const auto f = build_family(0.04);
  EXPECT_LE(max_abs_diff(f.psi_a.amps, column({std::sqrt(0.06), -std::sqrt(0.02), std::sqrt(0.92)})), 1e-15);
  EXPECT_NEAR(f.psi_a.amps(0).real(), 0.2449, 1e-4);
  EXPECT_NEAR(f.psi_a.amps(1).real(), -0.1414, 1e-4);
  EXPECT_NEAR(f.psi_a.amps(2).real(), 0.9591, 1e-4);
}

TEST(BuildFamily, GramAndOverlaps) {
  for (double e : kGrid) {
    const auto f = build_family(e);
    const CMatrix g = f.gram();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(std::abs(g(a, b) - (a == b ? 1.0 : 1.0 - 3 * e)), 0.0, 1e-12);
    EXPECT_LE(max_abs_diff(g, pointer_product_gram(e)), 1e-12);
    for (int a = 0; a < 3; ++a)
      EXPECT_NEAR(std::abs(f.psi.inner(MarkerFamily::extend(f.state(a))) - std::sqrt(1 - 3 * e)), 0.0, 1e-12);
    EXPECT_NEAR(f.psi.weight(), 1.0, 1e-12);
    const auto diff = f.psi_b - f.psi_a;
    EXPECT_NEAR(diff.weight(), 6 * e, 1e-12);
    EXPECT_LE(std::abs(diff.inner(f.psi_c)), 1e-12);
  }
}

TEST(BuildFamily, DomainErrors) {
  EXPECT_THROW(build_family(-0.01), DomainError);
  EXPECT_THROW(build_family(0.34), DomainError);
  EXPECT_THROW(build_family(std::nan("")), DomainError);
}

TEST(JointState, Checkpoints) {
  const auto s0 = joint_state(build_family(0.0), Stage::checkpoints);
  for (int p = 0; p < 3; ++p) EXPECT_LE(max_abs_diff(s0.paths[p].amps, CVector(basis_vector(3, 2) / std::sqrt(3.0))), 1e-15);
  for (double e : kGrid) EXPECT_NEAR(joint_state(build_family(e), Stage::checkpoints).weight(), 1.0, 1e-12);
}

TEST(JointState, AfterBs3AndExit) {
  for (double e : kGrid) {
    const auto f = build_family(e);
    const auto s3 = joint_state(f, Stage::after_bs3);
    EXPECT_LE(max_abs_diff(s3.paths[0].amps, CVector((f.psi_b + f.psi_a).amps / std::sqrt(6.0))), 1e-12);
    EXPECT_LE(max_abs_diff(s3.paths[1].amps, CVector((f.psi_b - f.psi_a).amps / std::sqrt(6.0))), 1e-12);
    EXPECT_LE(max_abs_diff(s3.paths[2].amps, CVector(f.psi_c.amps / std::sqrt(3.0))), 1e-12);
    EXPECT_NEAR(s3.paths[1].weight(), e, 1e-12);
    EXPECT_NEAR(s3.weight(), 1.0, 1e-12);

    const auto s4 = joint_state(f, Stage::exit);
    EXPECT_LE(max_abs_diff(s4.paths[2].amps, CVector((f.psi_c + f.psi_b - f.psi_a).amps / 3.0)), 1e-12);
    EXPECT_NEAR(s4.paths[2].weight(), (1 + 6 * e) / 9.0, 1e-12);
    EXPECT_NEAR(s4.weight(), 1.0, 1e-12);

    const auto sb = joint_state(f, Stage::before_bs4);
    EXPECT_NEAR(sb.weight(), 1.0 - (f.psi_b + f.psi_a).weight() / 6.0, 1e-12);
  }
}

TEST(JointState, FlattenOrdersPathSlowest) {
  const auto s = joint_state(build_family(0.1), Stage::checkpoints);
  const CVector v = s.flatten();
  for (int p = 0; p < 3; ++p)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(v(3 * p + k), s.paths[p].amps(k));
}

TEST(RhoFin, UnmarkedAndTrace) {
  const auto r0 = rho_fin(build_family(0.0));
  EXPECT_LE(max_abs_diff(r0.matrix(), projector(basis_vector(3, 2))), 1e-15);
  for (double e : kGrid) {
    const auto r = rho_fin(build_family(e));
    EXPECT_NEAR(r.trace(), 1.0, 1e-12);
    EXPECT_NEAR(r.purity(), 1.0, 1e-12);
  }
}

TEST(RhoFin, MatchesQubitPointerEvolution) {
  // Qubit pointers at A, B, C turned from |0> to sqrt(1-3e)|0> + sqrt(3e)|1>; condition on D.
  // The reduced pointer state and rho_fin must have the same Gram data with the family states.
  for (double e : kGrid) {
    const auto local = interferometer::LocalMarkers::symmetric(e);
    const auto full = interferometer::to_full(local);
    const CMatrix t = oracle::path_sum_t_fin(full);
    const CMatrix rho = t * full.rho.matrix() * t.adjoint();
    const double p = rho.trace().real();
    EXPECT_NEAR(p, (1 + 6 * e) / 9.0, 1e-12);

    // Final pointer states of the three routes in the 5-qubit space.
    const CVector psi0 = full.rho.matrix().col(0) / full.rho.matrix()(0, 0);
    const std::array<CVector, 3> route = {full.op(interferometer::Checkpoint::A) * psi0,
                                          full.op(interferometer::Checkpoint::B) * psi0,
                                          full.op(interferometer::Checkpoint::C) * psi0};
    const auto f = build_family(e);
    const auto rf = rho_fin(f);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Complex pointer = route[a].dot(rho * route[b]) / p;
        const Complex span = f.state(a).amps.dot(rf.matrix() * f.state(b).amps);
        EXPECT_LE(std::abs(pointer - span), 1e-12) << "e " << e << " a " << a << " b " << b;
      }
  }
}

TEST(Subensemble, CheckpointColumns) {
  for (double e : kGrid) {
    const auto f = build_family(e);
    const double s = std::sqrt(e);
    EXPECT_LE(max_abs_diff(subensemble(f, "A", Stage::checkpoints).amps, CVector(s * basis_vector(3, 0))), 1e-12);
    EXPECT_LE(max_abs_diff(subensemble(f, "B", Stage::checkpoints).amps, CVector(s * basis_vector(3, 1))), 1e-12);
    EXPECT_LE(max_abs_diff(subensemble(f, "C", Stage::checkpoints).amps, CVector(s * basis_vector(3, 2))), 1e-12);
    EXPECT_LE(max_abs_diff(subensemble(f, "0", Stage::checkpoints).amps,
                           CVector(std::sqrt(1 - 3 * e) * CVector::Ones(3) / std::sqrt(3.0))),
              1e-12);
  }
}

TEST(Subensemble, BeforeBs4AndExit) {
  for (double e : kGrid) {
    const auto f = build_family(e);
    const double h = std::sqrt(e / 2);
    EXPECT_LE(max_abs_diff(subensemble(f, "A", Stage::before_bs4).amps, column({0, -h, 0})), 1e-12);
    EXPECT_LE(max_abs_diff(subensemble(f, "B", Stage::before_bs4).amps, column({0, h, 0})), 1e-12);
    EXPECT_LE(max_abs_diff(subensemble(f, "C", Stage::before_bs4).amps, column({0, 0, std::sqrt(e)})), 1e-12);
    EXPECT_LE(max_abs_diff(subensemble(f, "0", Stage::before_bs4).amps, column({0, 0, std::sqrt((1 - 3 * e) / 3)})),
              1e-12);
    const double k = std::sqrt(e / 6);
    EXPECT_LE(max_abs_diff(subensemble(f, "B", Stage::exit).amps,
                           CVector(k * column({std::sqrt(3.0), -1, std::sqrt(2.0)}))),
              1e-12);
  }
}

TEST(Subensemble, WeightConservationAndOrthogonality) {
  const std::vector<std::string> outcomes = {"A", "B", "C", "0"};
  for (double e : kGrid)
    for (auto stage : {Stage::checkpoints, Stage::after_bs3, Stage::before_bs4, Stage::exit}) {
      const auto f = build_family(e);
      double total = 0.0;
      for (const auto& o : outcomes) total += subensemble(f, o, stage).weight();
      EXPECT_NEAR(total, joint_state(f, stage).weight(), 1e-12) << to_string(stage);
      if (stage != Stage::exit) continue;
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
          EXPECT_LE(std::abs(subensemble(f, outcomes[a], stage).amps.dot(subensemble(f, outcomes[b], stage).amps)),
                    1e-12);
        }
    }
}

TEST(Subensemble, UnknownOutcome) {
  EXPECT_THROW(subensemble(build_family(0.1), "D", Stage::exit), ContractError);
}

TEST(TwoPathMarkers, OverlapAndRange) {
  for (double e : {0.0, 0.04, 0.25, 0.5}) {
    const auto m = two_path_markers(e);
    EXPECT_NEAR(m.psi_a.inner(m.psi_b).real(), 1 - 2 * e, 1e-12);
    EXPECT_NEAR(m.psi_a.weight(), 1.0, 1e-12);
  }
  EXPECT_THROW(two_path_markers(0.51), DomainError);
}
