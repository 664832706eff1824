// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/grid.hpp"

#include <vector>

namespace mrcm {

/// One interface patch between an adjacent subdomain pair. The fixed
/// skeleton normal is the positive `axis` direction, i.e. the outward
/// normal of the lower subdomain `sub_lo`.
struct Patch {
  int id = -1;
  int axis = 0;
  int sub_lo = -1, sub_hi = -1;
  std::array<int, 2> t_axes{1, 2};   // tangential axes, ascending
  std::array<int, 2> t_lo{0, 0};     // global cell start along t_axes
  std::array<int, 2> t_dims{0, 0};   // patch size in fine faces
  int plane = 0;                     // face-plane index along axis
  int face_offset = 0;               // into the global skeleton enumeration

  int faceCount() const { return t_dims[0] * t_dims[1]; }
};

/// Non-overlapping box decomposition with its skeleton. Subdomains are
/// ordered x1-fastest; skeleton fine faces are ordered patch by patch,
/// first tangential axis fastest.
struct DomainDecomposition {
  StructuredGrid grid;
  std::array<int, 3> counts{1, 1, 1};
  std::array<int, 3> sub_cells{0, 0, 0};  // H_i / h_i
  std::vector<Box> subdomains;
  std::vector<Patch> patches;
  std::vector<std::vector<int>> sub_patches;  // patch ids per subdomain
  int skeleton_faces = 0;

  int subCount() const { return counts[0] * counts[1] * counts[2]; }
  int subIndex(int a, int b, int c) const {
    return a + counts[0] * (b + counts[1] * c);
  }
  /// Physical subdomain size along `axis`.
  double subExtent(int axis) const { return sub_cells[axis] * grid.h[axis]; }
};

DomainDecomposition decompose(const StructuredGrid& grid,
                              const std::array<int, 3>& counts);

/// Piecewise-constant interface space obtained by condensing skeleton fine
/// faces into coarse cells of `hbar_cells` fine cells per tangential axis.
struct InterfaceSpace {
  std::array<int, 3> hbar_cells{1, 1, 1};
  int basis_count = 0;
  std::vector<int> patch_offset;                 // first basis id per patch
  std::vector<std::array<int, 2>> patch_basis_dims;
  std::vector<std::vector<int>> sub_basis;       // I^l, sorted

  /// Basis id supported on the given fine face of a patch.
  int basisOfFace(const Patch& patch, int ft1, int ft2) const {
    const int c1 = ft1 / hbar_cells[patch.t_axes[0]];
    const int c2 = ft2 / hbar_cells[patch.t_axes[1]];
    const auto& bd = patch_basis_dims[patch.id];
    return patch_offset[patch.id] + c1 + bd[0] * c2;
  }
};

InterfaceSpace buildInterfaceSpace(const DomainDecomposition& dd,
                                   const std::array<int, 3>& hbar_cells);

/// Eq.-(14) cardinality evaluated directly from the decomposition.
long interfaceSpaceCardinality(const std::array<int, 3>& counts,
                               const std::array<int, 3>& sub_cells,
                               const std::array<int, 3>& hbar_cells);

/// Robin parameter per skeleton fine face and side:
/// beta = alpha * H_normal / K_normal(adjacent cell of that side).
struct RobinParams {
  double alpha = 1.0;
  Eigen::VectorXd beta_lo, beta_hi;  // global skeleton face ordering
};

RobinParams computeRobinParams(const DomainDecomposition& dd,
                               const PermeabilityField& khat, double alpha);

}  // namespace mrcm
