// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/bc.hpp"
#include "mrcm/grid.hpp"

#include <Eigen/SparseCore>

namespace mrcm {

/// Cell box viewed as a standalone grid; cell sizes come from the parent.
struct Subgrid {
  const StructuredGrid* parent = nullptr;
  Box box;

  static Subgrid whole(const StructuredGrid& g) {
    return Subgrid{&g, Box{{0, 0, 0}, g.dims}};
  }

  const std::array<int, 3>& dims() const { return box.dims; }
  int cells() const { return box.cellCount(); }
  const std::array<double, 3>& h() const { return parent->h; }

  int localIndex(int i, int j, int k) const { return box.localIndex(i, j, k); }
  int globalIndex(int i, int j, int k) const {
    return parent->cellIndex(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k);
  }

  /// Faces of one side, first tangential axis fastest.
  int sideFaceCount(int axis) const {
    auto t = tangentialAxes(axis);
    return box.dims[t[0]] * box.dims[t[1]];
  }
};

/// TPFA pressure system on a box: 7-point symmetric sparse matrix and RHS
/// in per-unit-cross-section units (transmissibilities divided by h^2).
struct SparseSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  std::array<int, 3> dims{0, 0, 0};
  bool pressure_closure = false;  // false => pure Neumann, singular
};

/// Half of the interface transmissibility of a face between cells with
/// permeabilities ka, kb: harmonic mean divided by h^2 (Eq. units of the
/// assembled matrix).
double faceTransmissibility(double ka, double kb, double h);

/// Assembles the Darcy pressure system on `sub` for mobility-scaled
/// permeability `khat` (global cell indexing) and boundary spec `bc`.
/// `f_local` is the source per box cell (empty means zero).
SparseSystem assemble(const Subgrid& sub, const PermeabilityField& khat,
                      const BoundarySpec& bc, const Eigen::VectorXd& f_local);

/// Two-point flux recovery consistent with `assemble`'s closures:
/// interior u = -K~ (p_hi - p_lo)/h, boundary faces honor the side condition.
FaceFluxField recoverFluxes(const Subgrid& sub, const PermeabilityField& khat,
                            const BoundarySpec& bc, const Eigen::VectorXd& p_local);

/// Per-cell discrete mass residual sum_a (u_hi - u_lo)/h_a - f.
Eigen::VectorXd cellMassResidual(const Subgrid& sub, const FaceFluxField& flux,
                                 const Eigen::VectorXd& f_local);

/// Natural magnitude for residual comparisons: |f|_inf + sum_a max|u_a|/h_a.
double residualScale(const Subgrid& sub, const FaceFluxField& flux,
                     const Eigen::VectorXd& f_local);

}  // namespace mrcm
