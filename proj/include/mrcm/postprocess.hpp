// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/engine.hpp"

namespace mrcm {

/// Arithmetic mean of the two one-sided skeleton traces per fine face;
/// transfers the same coarse-scale mass as the multiscale solution.
Eigen::VectorXd averageSkeletonFlux(const MultiscaleSolution& msol);

/// Fine-scale conservative single-valued flux field recovered by the Mean
/// method: averaged skeleton fluxes become Neumann data for per-subdomain
/// re-solves whose interior fluxes replace the multiscale ones.
struct ConservativeFlux {
  FaceFluxField flux;
  double max_imbalance = 0.0;  // worst per-subdomain source/boundary defect
};

ConservativeFlux conservativeReconstruction(const DomainDecomposition& dd,
                                            const PermeabilityField& khat,
                                            const CellField& f,
                                            const MultiscaleSolution& msol,
                                            const WorkerPool& pool,
                                            double imbalance_tol = 1e-8);

}  // namespace mrcm
