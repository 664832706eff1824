// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/grid.hpp"

namespace mrcm {

enum class BcKind { Dirichlet, Neumann, Robin };

/// Condition on one side of a box. `data` holds one value per fine face of
/// the side (first tangential axis fastest) or a single broadcast value:
///   Dirichlet: face pressure g_p
///   Neumann:   outward normal flux g_u
///   Robin:     right-hand side r of  -beta u.n_out + p = r
struct SideBc {
  BcKind kind = BcKind::Neumann;
  Eigen::VectorXd data = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd beta;  // Robin only, per face or broadcast, > 0

  double dataAt(int face) const { return data.size() == 1 ? data[0] : data[face]; }
  double betaAt(int face) const { return beta.size() == 1 ? beta[0] : beta[face]; }
};

/// Boundary data for all six sides of a box; side index 2*axis + (0 lo, 1 hi).
struct BoundarySpec {
  std::array<SideBc, 6> sides;

  SideBc& side(int axis, int high) { return sides[2 * axis + high]; }
  const SideBc& side(int axis, int high) const { return sides[2 * axis + high]; }

  /// True if any side constrains pressure (Dirichlet or Robin); a spec
  /// without one yields a singular (pure Neumann) system.
  bool hasPressureClosure() const {
    for (const SideBc& s : sides)
      if (s.kind != BcKind::Neumann) return true;
    return false;
  }
};

inline BoundarySpec noFlowBc() { return BoundarySpec{}; }

/// Dirichlet p_lo / p_hi on the two faces perpendicular to `axis`,
/// no-flow on the remaining sides.
inline BoundarySpec pressureDriveBc(int axis, double p_lo, double p_hi) {
  BoundarySpec bc;
  bc.side(axis, 0).kind = BcKind::Dirichlet;
  bc.side(axis, 0).data = Eigen::VectorXd::Constant(1, p_lo);
  bc.side(axis, 1).kind = BcKind::Dirichlet;
  bc.side(axis, 1).data = Eigen::VectorXd::Constant(1, p_hi);
  return bc;
}

}  // namespace mrcm
