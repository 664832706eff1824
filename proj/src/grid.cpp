// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/grid.hpp"

#include <cmath>

namespace mrcm {

StructuredGrid makeGrid(const std::array<int, 3>& dims,
                        const std::array<double, 3>& extents) {
  StructuredGrid g;
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1)
      throw std::invalid_argument("grid dimension " + std::to_string(a) +
                                  " must be positive, got " + std::to_string(dims[a]));
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
      throw std::invalid_argument("grid extent " + std::to_string(a) +
                                  " must be positive and finite");
    g.dims[a] = dims[a];
    g.extents[a] = extents[a];
    g.h[a] = extents[a] / dims[a];
  }
  return g;
}

void validatePermeability(const PermeabilityField& field) {
  for (int a = 0; a < 3; ++a) {
    const Eigen::ArrayXd& c = field.component(a);
    if (c.size() == 0) throw std::invalid_argument("empty permeability component");
    if (!c.isFinite().all())
      throw std::invalid_argument("permeability contains non-finite values");
    if ((c <= 0.0).any())
      throw std::invalid_argument("permeability must be strictly positive");
  }
  if (field.k22.size() != field.k11.size() || field.k33.size() != field.k11.size())
    throw std::invalid_argument("permeability components differ in length");
}

}  // namespace mrcm
