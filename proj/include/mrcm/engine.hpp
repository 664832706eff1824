// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/decomp.hpp"
#include "mrcm/fv.hpp"
#include "mrcm/linalg.hpp"
#include "mrcm/pool.hpp"
#include "mrcm/timer.hpp"

#include <vector>

namespace mrcm {

/// Local boundary spec of one subdomain: exterior sides restricted from the
/// global spec, skeleton sides Robin with zero datum (the datum enters the
/// right-hand side per basis function).
struct LocalProblem {
  Subgrid sub;
  BoundarySpec bc;
  std::array<int, 6> side_patch{-1, -1, -1, -1, -1, -1};  // patch id or -1
};

LocalProblem buildLocalProblem(const DomainDecomposition& dd,
                               const RobinParams& robin, const BoundarySpec& bc,
                               int sub);

/// Multiscale basis data for one subdomain: cell pressure solutions and
/// oriented skeleton flux traces, one column per local problem in the order
/// [phi_k as pressure datum | phi_k as flux datum | particular].
struct MbfSet {
  int sub = -1;
  std::vector<int> basis;            // I^l, sorted global basis ids
  Eigen::MatrixXd pressures;         // box cells x (2|I|+1)
  Eigen::MatrixXd traces;            // subdomain skeleton faces x columns

  struct SkelFace {
    int patch = -1;
    int face = 0;    // patch-local face index
    int sign = 1;    // n.n^l: +1 when this subdomain owns the skeleton normal
    int cell = 0;    // adjacent local cell
  };
  std::vector<SkelFace> skel;
  std::vector<std::pair<int, int>> patch_spans;  // (patch id, offset into skel)

  int columns() const { return static_cast<int>(pressures.cols()); }
  int basisCount() const { return static_cast<int>(basis.size()); }
  int spanOf(int patch_id) const {
    for (const auto& s : patch_spans)
      if (s.first == patch_id) return s.second;
    throw std::logic_error("subdomain does not touch patch");
  }
};

MbfSet computeMbfs(const DomainDecomposition& dd, const InterfaceSpace& space,
                   const RobinParams& robin, const PermeabilityField& khat,
                   const BoundarySpec& bc, const CellField& f, int sub);

/// The 2 N_V x 2 N_V coupling system in block form
/// [[A_PP, A_PU], [A_UP, A_UU]], unknowns X = (pi_p, pi_u).
struct InterfaceSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  int n_basis = 0;
};

InterfaceSystem assembleInterface(const DomainDecomposition& dd,
                                  const InterfaceSpace& space,
                                  const RobinParams& robin,
                                  const std::vector<MbfSet>& mbfs);

/// Direct LU solve; pins the first pressure coefficient when the outer
/// problem fixes pressure only up to a constant. Verifies the residual
/// ||A X - b|| <= 1e-10 ||b||.
Eigen::VectorXd solveInterface(const InterfaceSystem& system, bool pin_first);

struct MultiscaleSolution {
  CellField pressure;
  FaceFluxField flux;   // single-valued; skeleton faces carry the side average
  Eigen::VectorXd skel_lo, skel_hi;  // oriented one-sided traces per skeleton face
  Eigen::VectorXd coeffs;            // interface solution X
  StageTimings timings;
};

MultiscaleSolution reconstruct(const DomainDecomposition& dd,
                               const InterfaceSpace& space,
                               const RobinParams& robin,
                               const std::vector<MbfSet>& mbfs,
                               const Eigen::VectorXd& coeffs,
                               const PermeabilityField& khat,
                               const BoundarySpec& bc, const WorkerPool& pool);

/// Algorithm: per-subdomain local solves, interface assembly + solve,
/// local reconstruction. The two gather points are the only
/// synchronization; all per-subdomain work runs on the pool.
MultiscaleSolution solveMrcm(const DomainDecomposition& dd,
                             const InterfaceSpace& space,
                             const PermeabilityField& khat,
                             const BoundarySpec& bc, const CellField& f,
                             double alpha, const WorkerPool& pool);

enum class FineSolver { Direct, Krylov };

struct FineSolution {
  CellField pressure;
  FaceFluxField flux;
  StageTimings timings;
  KrylovResult krylov;  // populated for the Krylov path
};

/// Global single-grid TPFA solve; pins cell 0 for pure-Neumann problems.
/// Direct solves above `unknown_cap` are refused.
FineSolution solveFine(const StructuredGrid& grid, const PermeabilityField& khat,
                       const BoundarySpec& bc, const CellField& f,
                       FineSolver choice = FineSolver::Direct,
                       const KrylovConfig& krylov_config = {},
                       long unknown_cap = 2'000'000);

}  // namespace mrcm
