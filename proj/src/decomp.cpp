// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/decomp.hpp"

#include <algorithm>

namespace mrcm {

DomainDecomposition decompose(const StructuredGrid& grid,
                              const std::array<int, 3>& counts) {
  DomainDecomposition dd;
  dd.grid = grid;
  dd.counts = counts;
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < 1)
      throw std::invalid_argument("subdomain count must be positive");
    if (grid.dims[a] % counts[a] != 0)
      throw std::invalid_argument(
          "subdomain count " + std::to_string(counts[a]) +
          " does not divide grid dimension " + std::to_string(grid.dims[a]) +
          " along axis " + std::to_string(a));
    dd.sub_cells[a] = grid.dims[a] / counts[a];
  }

  dd.subdomains.resize(dd.subCount());
  for (int c = 0; c < counts[2]; ++c)
    for (int b = 0; b < counts[1]; ++b)
      for (int a = 0; a < counts[0]; ++a) {
        Box box;
        box.lo = {a * dd.sub_cells[0], b * dd.sub_cells[1], c * dd.sub_cells[2]};
        box.dims = dd.sub_cells;
        dd.subdomains[dd.subIndex(a, b, c)] = box;
      }

  dd.sub_patches.resize(dd.subCount());
  int face_offset = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const auto t = tangentialAxes(axis);
    for (int c = 0; c < counts[2]; ++c)
      for (int b = 0; b < counts[1]; ++b)
        for (int a = 0; a < counts[0]; ++a) {
          std::array<int, 3> s{a, b, c};
          if (s[axis] + 1 >= counts[axis]) continue;
          std::array<int, 3> sn = s;
          sn[axis] += 1;
          Patch p;
          p.id = static_cast<int>(dd.patches.size());
          p.axis = axis;
          p.sub_lo = dd.subIndex(s[0], s[1], s[2]);
          p.sub_hi = dd.subIndex(sn[0], sn[1], sn[2]);
          p.t_axes = t;
          p.t_lo = {s[t[0]] * dd.sub_cells[t[0]], s[t[1]] * dd.sub_cells[t[1]]};
          p.t_dims = {dd.sub_cells[t[0]], dd.sub_cells[t[1]]};
          p.plane = (s[axis] + 1) * dd.sub_cells[axis];
          p.face_offset = face_offset;
          face_offset += p.faceCount();
          dd.sub_patches[p.sub_lo].push_back(p.id);
          dd.sub_patches[p.sub_hi].push_back(p.id);
          dd.patches.push_back(p);
        }
  }
  dd.skeleton_faces = face_offset;
  return dd;
}

long interfaceSpaceCardinality(const std::array<int, 3>& counts,
                               const std::array<int, 3>& sub_cells,
                               const std::array<int, 3>& hbar_cells) {
  long total = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const auto t = tangentialAxes(axis);
    const long interfaces = static_cast<long>(counts[axis] - 1) *
                            counts[t[0]] * counts[t[1]];
    const long dof_per = static_cast<long>(sub_cells[t[0]] / hbar_cells[t[0]]) *
                         (sub_cells[t[1]] / hbar_cells[t[1]]);
    total += interfaces * dof_per;
  }
  return total;
}

InterfaceSpace buildInterfaceSpace(const DomainDecomposition& dd,
                                   const std::array<int, 3>& hbar_cells) {
  for (int a = 0; a < 3; ++a) {
    if (hbar_cells[a] < 1 || hbar_cells[a] > dd.sub_cells[a])
      throw std::invalid_argument("coarsening size along axis " + std::to_string(a) +
                                  " must lie in [1, " +
                                  std::to_string(dd.sub_cells[a]) + "] cells");
    if (dd.sub_cells[a] % hbar_cells[a] != 0)
      throw std::invalid_argument("coarsening size must divide the subdomain size");
  }

  InterfaceSpace space;
  space.hbar_cells = hbar_cells;
  space.patch_offset.resize(dd.patches.size());
  space.patch_basis_dims.resize(dd.patches.size());
  int next = 0;
  for (const Patch& p : dd.patches) {
    space.patch_offset[p.id] = next;
    space.patch_basis_dims[p.id] = {p.t_dims[0] / hbar_cells[p.t_axes[0]],
                                    p.t_dims[1] / hbar_cells[p.t_axes[1]]};
    next += space.patch_basis_dims[p.id][0] * space.patch_basis_dims[p.id][1];
  }
  space.basis_count = next;

  space.sub_basis.resize(dd.subCount());
  for (int s = 0; s < dd.subCount(); ++s) {
    for (int pid : dd.sub_patches[s]) {
      const auto& bd = space.patch_basis_dims[pid];
      for (int b = 0; b < bd[0] * bd[1]; ++b)
        space.sub_basis[s].push_back(space.patch_offset[pid] + b);
    }
    std::sort(space.sub_basis[s].begin(), space.sub_basis[s].end());
  }
  return space;
}

RobinParams computeRobinParams(const DomainDecomposition& dd,
                               const PermeabilityField& khat, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("Robin parameter alpha must be positive");
  RobinParams rp;
  rp.alpha = alpha;
  rp.beta_lo.resize(dd.skeleton_faces);
  rp.beta_hi.resize(dd.skeleton_faces);
  for (const Patch& p : dd.patches) {
    const double h_normal = dd.subExtent(p.axis);
    const Eigen::ArrayXd& k = khat.component(p.axis);
    for (int f2 = 0; f2 < p.t_dims[1]; ++f2)
      for (int f1 = 0; f1 < p.t_dims[0]; ++f1) {
        std::array<int, 3> cell_lo{}, cell_hi{};
        cell_lo[p.axis] = p.plane - 1;
        cell_hi[p.axis] = p.plane;
        cell_lo[p.t_axes[0]] = cell_hi[p.t_axes[0]] = p.t_lo[0] + f1;
        cell_lo[p.t_axes[1]] = cell_hi[p.t_axes[1]] = p.t_lo[1] + f2;
        const int face = p.face_offset + f1 + p.t_dims[0] * f2;
        rp.beta_lo[face] =
            alpha * h_normal / k[dd.grid.cellIndex(cell_lo[0], cell_lo[1], cell_lo[2])];
        rp.beta_hi[face] =
            alpha * h_normal / k[dd.grid.cellIndex(cell_hi[0], cell_hi[1], cell_hi[2])];
      }
  }
  return rp;
}

}  // namespace mrcm
