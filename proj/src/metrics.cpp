// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/metrics.hpp"

#include <cmath>

namespace mrcm {

double pressureNorm(const StructuredGrid& grid, const CellField& p) {
  if (p.size() != grid.cellCount())
    throw std::invalid_argument("pressure field size mismatch");
  return std::sqrt(grid.cellVolume() * p.squaredNorm());
}

double velocityNorm(const StructuredGrid& grid, const FaceFluxField& u,
                    const PermeabilityField& k) {
  if (u.dims != grid.dims) throw std::invalid_argument("flux dims mismatch");
  if (k.cells() != grid.cellCount())
    throw std::invalid_argument("permeability size mismatch");
  double acc = 0.0;
  std::array<int, 3> fc;
  for (int a = 0; a < 3; ++a) {
    const Eigen::ArrayXd& ka = k.component(a);
    const double dual = grid.h[a] * grid.faceArea(a);
    std::array<int, 3> fdims = grid.dims;
    fdims[a] += 1;
    for (fc[2] = 0; fc[2] < fdims[2]; ++fc[2])
      for (fc[1] = 0; fc[1] < fdims[1]; ++fc[1])
        for (fc[0] = 0; fc[0] < fdims[0]; ++fc[0]) {
          const double v = u.component(a)[u.faceIndex(a, fc[0], fc[1], fc[2])];
          std::array<int, 3> hi = fc, lo = fc;
          lo[a] -= 1;
          double weight;
          if (fc[a] == 0) {
            weight = 0.5 * dual / ka[grid.cellIndex(hi[0], hi[1], hi[2])];
          } else if (fc[a] == grid.dims[a]) {
            weight = 0.5 * dual / ka[grid.cellIndex(lo[0], lo[1], lo[2])];
          } else {
            const double klo = ka[grid.cellIndex(lo[0], lo[1], lo[2])];
            const double khi = ka[grid.cellIndex(hi[0], hi[1], hi[2])];
            weight = dual * (klo + khi) / (2.0 * klo * khi);  // 1/harmonic mean
          }
          acc += weight * v * v;
        }
  }
  return std::sqrt(acc);
}

double pressureError(const StructuredGrid& grid, const CellField& p_a,
                     const CellField& p_b, bool subtract_mean) {
  if (p_a.size() != p_b.size())
    throw std::invalid_argument("pressure field size mismatch");
  CellField a = p_a, b = p_b;
  if (subtract_mean) {
    a.array() -= a.mean();
    b.array() -= b.mean();
  }
  const double denom = pressureNorm(grid, b);
  if (denom == 0.0)
    throw std::invalid_argument("reference pressure field has zero norm");
  return pressureNorm(grid, a - b) / denom;
}

double velocityError(const StructuredGrid& grid, const FaceFluxField& u_a,
                     const FaceFluxField& u_b, const PermeabilityField& k) {
  if (u_a.dims != u_b.dims) throw std::invalid_argument("flux dims mismatch");
  FaceFluxField diff = u_a;
  for (int a = 0; a < 3; ++a) diff.component(a) -= u_b.component(a);
  const double denom = velocityNorm(grid, u_b, k);
  if (denom == 0.0) {
    if (velocityNorm(grid, diff, k) == 0.0) return 0.0;
    throw std::invalid_argument("reference velocity field has zero norm");
  }
  return velocityNorm(grid, diff, k) / denom;
}

SkeletonJumps skeletonJumps(const DomainDecomposition& dd,
                            const PermeabilityField& khat,
                            const MultiscaleSolution& msol) {
  if (msol.skel_lo.size() != dd.skeleton_faces)
    throw std::invalid_argument("two-sided traces unavailable");
  SkeletonJumps jumps;
  for (const Patch& p : dd.patches) {
    const Eigen::ArrayXd& ka = khat.component(p.axis);
    const double h = dd.grid.h[p.axis];
    for (int f2 = 0; f2 < p.t_dims[1]; ++f2)
      for (int f1 = 0; f1 < p.t_dims[0]; ++f1) {
        const int gface = p.face_offset + f1 + p.t_dims[0] * f2;
        std::array<int, 3> lo{}, hi{};
        lo[p.axis] = p.plane - 1;
        hi[p.axis] = p.plane;
        lo[p.t_axes[0]] = hi[p.t_axes[0]] = p.t_lo[0] + f1;
        lo[p.t_axes[1]] = hi[p.t_axes[1]] = p.t_lo[1] + f2;
        const int cell_lo = dd.grid.cellIndex(lo[0], lo[1], lo[2]);
        const int cell_hi = dd.grid.cellIndex(hi[0], hi[1], hi[2]);
        const double u_lo = msol.skel_lo[gface];
        const double u_hi = msol.skel_hi[gface];
        // p_face = p_cell - (u.n_out)/T'; n_out is +axis on the lo side
        const double p_lo =
            msol.pressure[cell_lo] - u_lo * h / (2.0 * ka[cell_lo]);
        const double p_hi =
            msol.pressure[cell_hi] + u_hi * h / (2.0 * ka[cell_hi]);
        jumps.max_pressure_jump =
            std::max(jumps.max_pressure_jump, std::abs(p_lo - p_hi));
        jumps.max_flux_jump = std::max(jumps.max_flux_jump, std::abs(u_lo - u_hi));
      }
  }
  return jumps;
}

}  // namespace mrcm
