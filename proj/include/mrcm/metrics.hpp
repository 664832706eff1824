// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/engine.hpp"

namespace mrcm {

struct ErrorReport {
  double pressure_error = 0.0;
  double velocity_error = 0.0;
  double max_pressure_jump = 0.0;
  double max_flux_jump = 0.0;
};

/// Cell-volume-weighted L2 norm.
double pressureNorm(const StructuredGrid& grid, const CellField& p);

/// Face-sampled K^-1-weighted L2 norm: each face carries the dual volume
/// h_axis * area (halved on the boundary) over the harmonic mean of the
/// adjacent permeability components.
double velocityNorm(const StructuredGrid& grid, const FaceFluxField& u,
                    const PermeabilityField& k);

/// ||p_a - p_b|| / ||p_b||; with `subtract_mean` both fields are shifted to
/// zero mean first (pressure defined up to a constant). Zero ||p_b|| throws.
double pressureError(const StructuredGrid& grid, const CellField& p_a,
                     const CellField& p_b, bool subtract_mean);

double velocityError(const StructuredGrid& grid, const FaceFluxField& u_a,
                     const FaceFluxField& u_b, const PermeabilityField& k);

/// Max pointwise skeleton jumps of the multiscale solution: the pressure
/// trace from side l is p_cell - (u . n_out)/T' with T' = 2 khat / h.
struct SkeletonJumps {
  double max_pressure_jump = 0.0;
  double max_flux_jump = 0.0;
};

SkeletonJumps skeletonJumps(const DomainDecomposition& dd,
                            const PermeabilityField& khat,
                            const MultiscaleSolution& msol);

}  // namespace mrcm
