// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/grid.hpp"

#include <cstdint>
#include <string>

namespace mrcm {

/// Uniform isotropic field with every component equal to `value`.
PermeabilityField uniformPermeability(const StructuredGrid& grid, double value);

/// Synthetic channelized permeability: a lognormal background (log-standard
/// deviation scaled by `sigma`) plus sinuous high-permeability channels,
/// normalized so each component's max/min ratio equals `contrast` exactly.
/// Deterministic per seed.
PermeabilityField channelField(const StructuredGrid& grid, std::uint64_t seed,
                               double contrast, double sigma = 0.6);

/// Reads a whitespace-separated ASCII file holding all K11 values
/// (x1-fastest), then K22, then K33; 3*N values for `file_dims`.
/// An optional zero-based x3 layer range [layer_lo, layer_lo+layer_count)
/// restricts the result to those layers.
PermeabilityField importSpe10(const std::string& path,
                              const std::array<int, 3>& file_dims,
                              int layer_lo = 0, int layer_count = -1);

/// Writes the same ASCII layout importSpe10 reads; values round-trip exactly.
void exportSpe10(const std::string& path, const PermeabilityField& field);

/// Piecewise-constant prolongation onto a grid refined by integer `factors`;
/// preserves the volume-weighted mean of each component.
PermeabilityField refineField(const PermeabilityField& field,
                              const std::array<int, 3>& coarse_dims,
                              const std::array<int, 3>& factors);

/// Componentwise power K^theta; maps contrast c to c^theta.
PermeabilityField applyContrastExponent(const PermeabilityField& field,
                                        double theta);

}  // namespace mrcm
