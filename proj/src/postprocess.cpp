// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/postprocess.hpp"

#include <cmath>

namespace mrcm {

Eigen::VectorXd averageSkeletonFlux(const MultiscaleSolution& msol) {
  if (msol.skel_lo.size() != msol.skel_hi.size())
    throw std::invalid_argument("two-sided traces unavailable");
  return 0.5 * (msol.skel_lo + msol.skel_hi);
}

ConservativeFlux conservativeReconstruction(const DomainDecomposition& dd,
                                            const PermeabilityField& khat,
                                            const CellField& f,
                                            const MultiscaleSolution& msol,
                                            const WorkerPool& pool,
                                            double imbalance_tol) {
  const Eigen::VectorXd mean = averageSkeletonFlux(msol);

  ConservativeFlux out;
  out.flux.resize(dd.grid.dims);
  Eigen::VectorXd imbalances = Eigen::VectorXd::Zero(dd.subCount());

  pool.parallelFor(dd.subCount(), [&](int s) {
    const Box& box = dd.subdomains[s];
    const Subgrid sg{&dd.grid, box};
    const Eigen::VectorXd f_local = [&] {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(sg.cells());
      if (f.size() == 0) return v;
      for (int k = 0; k < box.dims[2]; ++k)
        for (int j = 0; j < box.dims[1]; ++j)
          for (int i = 0; i < box.dims[0]; ++i)
            v[box.localIndex(i, j, k)] =
                f[dd.grid.cellIndex(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k)];
      return v;
    }();

    // All-Neumann local data: averaged skeleton fluxes on interface sides,
    // the multiscale boundary fluxes elsewhere, converted to outward datum.
    BoundarySpec nbc;
    double data_mass = 0.0, data_scale = 0.0, total_area = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const auto t = tangentialAxes(axis);
      const double area = dd.grid.faceArea(axis);
      for (int high = 0; high < 2; ++high) {
        SideBc& side = nbc.side(axis, high);
        side.kind = BcKind::Neumann;
        side.data.resize(sg.sideFaceCount(axis));
        const double sign = high ? 1.0 : -1.0;
        const bool exterior = high ? (box.lo[axis] + box.dims[axis] == dd.grid.dims[axis])
                                   : (box.lo[axis] == 0);
        const Patch* patch = nullptr;
        if (!exterior) {
          for (int pid : dd.sub_patches[s]) {
            const Patch& p = dd.patches[pid];
            if (p.axis == axis && ((high && p.sub_lo == s) || (!high && p.sub_hi == s)))
              patch = &p;
          }
        }
        for (int f2 = 0; f2 < box.dims[t[1]]; ++f2)
          for (int f1 = 0; f1 < box.dims[t[0]]; ++f1) {
            const int lf = f1 + box.dims[t[0]] * f2;
            double oriented;
            if (patch) {
              oriented = mean[patch->face_offset + lf];
            } else {
              std::array<int, 3> fc{};
              fc[axis] = box.lo[axis] + (high ? box.dims[axis] : 0);
              fc[t[0]] = box.lo[t[0]] + f1;
              fc[t[1]] = box.lo[t[1]] + f2;
              oriented = msol.flux.component(axis)[msol.flux.faceIndex(
                  axis, fc[0], fc[1], fc[2])];
            }
            side.data[lf] = sign * oriented;
            data_mass += side.data[lf] * area;
            data_scale += std::abs(side.data[lf]) * area;
            total_area += area;
          }
      }
    }
    const double source_mass = f_local.sum() * dd.grid.cellVolume();
    const double defect = data_mass - source_mass;
    const double scale =
        data_scale + std::abs(f_local.cwiseAbs().sum() * dd.grid.cellVolume());
    imbalances[s] = scale > 0.0 ? std::abs(defect) / scale : std::abs(defect);
    if (imbalances[s] > imbalance_tol)
      throw std::runtime_error(
          "subdomain " + std::to_string(s) +
          ": Neumann/source imbalance " + std::to_string(imbalances[s]) +
          " exceeds tolerance");
    // Spread the sub-tolerance defect uniformly over the boundary so the
    // discrete Neumann problem is exactly solvable.
    const double shift = defect / total_area;
    for (int side = 0; side < 6; ++side) nbc.sides[side].data.array() -= shift;

    SparseSystem sys = assemble(sg, khat, nbc, f_local);
    const Factorization fact(sys.A, 0, false);
    const Eigen::VectorXd p_local = fact.solve(sys.rhs);
    const FaceFluxField local = recoverFluxes(sg, khat, nbc, p_local);

    // Interior and exterior faces; skeleton faces take the average exactly.
    for (int a = 0; a < 3; ++a) {
      std::array<int, 3> fdims = box.dims;
      fdims[a] += 1;
      std::array<int, 3> fc;
      for (fc[2] = 0; fc[2] < fdims[2]; ++fc[2])
        for (fc[1] = 0; fc[1] < fdims[1]; ++fc[1])
          for (fc[0] = 0; fc[0] < fdims[0]; ++fc[0]) {
            const bool lo_skel = fc[a] == 0 && box.lo[a] > 0;
            const bool hi_skel =
                fc[a] == box.dims[a] && box.lo[a] + box.dims[a] < dd.grid.dims[a];
            if (lo_skel || hi_skel) continue;
            out.flux.component(a)[out.flux.faceIndex(a, box.lo[0] + fc[0],
                                                     box.lo[1] + fc[1],
                                                     box.lo[2] + fc[2])] =
                local.component(a)[local.faceIndex(a, fc[0], fc[1], fc[2])];
          }
    }
  });

  for (const Patch& p : dd.patches)
    for (int f2 = 0; f2 < p.t_dims[1]; ++f2)
      for (int f1 = 0; f1 < p.t_dims[0]; ++f1) {
        std::array<int, 3> fc{};
        fc[p.axis] = p.plane;
        fc[p.t_axes[0]] = p.t_lo[0] + f1;
        fc[p.t_axes[1]] = p.t_lo[1] + f2;
        out.flux.component(p.axis)[out.flux.faceIndex(p.axis, fc[0], fc[1], fc[2])] =
            mean[p.face_offset + f1 + p.t_dims[0] * f2];
      }

  out.max_imbalance = dd.subCount() ? imbalances.maxCoeff() : 0.0;
  return out;
}

}  // namespace mrcm
