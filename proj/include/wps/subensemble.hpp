#pragma once

#include <string>

#include "wps/discrimination.hpp"
#include "wps/marker.hpp"

namespace wps::marker {

/// Weighted path column of the particles for which the UD measurement gives `outcome`
/// (A, B, C or 0), at the given stage. The squared norm is the subensemble weight.
inline PathColumn subensemble(const MarkerFamily& family, const std::string& outcome, Stage stage) {
  const auto ud = discrimination::ud3(family.epsilon);
  CVector bra;
  if (outcome == "A")
    bra = ud.mu[0];
  else if (outcome == "B")
    bra = ud.mu[1];
  else if (outcome == "C")
    bra = ud.mu[2];
  else if (outcome == "0")
    bra = ud.phi0;
  else
    throw ContractError("subensemble: unknown outcome label '" + outcome + "'");

  const JointState joint = joint_state(family, stage);
  CVector col(3);
  for (int p = 0; p < 3; ++p) col(p) = bra.dot(joint.paths[static_cast<std::size_t>(p)].amps);
  return {col};
}

}  // namespace wps::marker
