// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/engine.hpp"

#include <algorithm>
#include <cmath>

namespace mrcm {

namespace {

// Restricts global side data (broadcast or one value per global side face)
// to a subdomain box.
Eigen::VectorXd restrictSideData(const Eigen::VectorXd& data,
                                 const StructuredGrid& grid, int axis,
                                 const Box& box) {
  if (data.size() <= 1) return data;
  const auto t = tangentialAxes(axis);
  Eigen::VectorXd out(box.dims[t[0]] * box.dims[t[1]]);
  for (int f2 = 0; f2 < box.dims[t[1]]; ++f2)
    for (int f1 = 0; f1 < box.dims[t[0]]; ++f1)
      out[f1 + box.dims[t[0]] * f2] =
          data[(box.lo[t[0]] + f1) + grid.dims[t[0]] * (box.lo[t[1]] + f2)];
  return out;
}

Eigen::VectorXd restrictCellData(const Eigen::VectorXd& data,
                                 const StructuredGrid& grid, const Box& box) {
  if (data.size() == 0) return data;
  Eigen::VectorXd out(box.cellCount());
  for (int k = 0; k < box.dims[2]; ++k)
    for (int j = 0; j < box.dims[1]; ++j)
      for (int i = 0; i < box.dims[0]; ++i)
        out[box.localIndex(i, j, k)] =
            data[grid.cellIndex(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k)];
  return out;
}

int findSidePatch(const DomainDecomposition& dd, int sub, int axis, int high) {
  for (int pid : dd.sub_patches[sub]) {
    const Patch& p = dd.patches[pid];
    if (p.axis != axis) continue;
    if (high && p.sub_lo == sub) return pid;
    if (!high && p.sub_hi == sub) return pid;
  }
  return -1;
}

// The columns of the per-face Robin datum: index of phi_k as pressure datum,
// as flux datum, and the particular problem.
struct ColumnLayout {
  int n_basis = 0;
  int pCol(int local_k) const { return local_k; }
  int uCol(int local_k) const { return n_basis + local_k; }
  int particularCol() const { return 2 * n_basis; }
  int total() const { return 2 * n_basis + 1; }
};

int localBasisIndex(const std::vector<int>& basis, int global_id) {
  auto it = std::lower_bound(basis.begin(), basis.end(), global_id);
  if (it == basis.end() || *it != global_id)
    throw std::logic_error("basis id not active on subdomain");
  return static_cast<int>(it - basis.begin());
}

}  // namespace

LocalProblem buildLocalProblem(const DomainDecomposition& dd,
                               const RobinParams& robin, const BoundarySpec& bc,
                               int sub) {
  LocalProblem lp;
  lp.sub = Subgrid{&dd.grid, dd.subdomains[sub]};
  const Box& box = dd.subdomains[sub];
  for (int axis = 0; axis < 3; ++axis) {
    for (int high = 0; high < 2; ++high) {
      const bool exterior = high ? (box.lo[axis] + box.dims[axis] == dd.grid.dims[axis])
                                 : (box.lo[axis] == 0);
      SideBc& side = lp.bc.side(axis, high);
      if (exterior) {
        const SideBc& gside = bc.side(axis, high);
        side.kind = gside.kind;
        side.data = restrictSideData(gside.data, dd.grid, axis, box);
        if (gside.kind == BcKind::Robin)
          side.beta = restrictSideData(gside.beta, dd.grid, axis, box);
        continue;
      }
      const int pid = findSidePatch(dd, sub, axis, high);
      if (pid < 0) throw std::logic_error("interior side without patch");
      const Patch& p = dd.patches[pid];
      lp.side_patch[2 * axis + high] = pid;
      side.kind = BcKind::Robin;
      side.data = Eigen::VectorXd::Zero(p.faceCount());
      const Eigen::VectorXd& beta_all = high ? robin.beta_lo : robin.beta_hi;
      side.beta = beta_all.segment(p.face_offset, p.faceCount());
    }
  }
  return lp;
}

MbfSet computeMbfs(const DomainDecomposition& dd, const InterfaceSpace& space,
                   const RobinParams& robin, const PermeabilityField& khat,
                   const BoundarySpec& bc, const CellField& f, int sub) {
  const LocalProblem lp = buildLocalProblem(dd, robin, bc, sub);
  const Subgrid& sg = lp.sub;
  const auto& h = sg.h();

  MbfSet mbf;
  mbf.sub = sub;
  mbf.basis = space.sub_basis[sub];
  const ColumnLayout cols{mbf.basisCount()};

  // Skeleton face enumeration: this subdomain's patches in ascending id
  // order, faces first-tangential-axis fastest. The Robin closure
  // coefficients T_eff = 1/(beta + h/(2 khat)) are collected alongside.
  std::vector<double> t_eff, beta_side;
  std::vector<int> face_basis;  // local basis index covering each face
  for (int pid : dd.sub_patches[sub]) {
    const Patch& p = dd.patches[pid];
    mbf.patch_spans.emplace_back(pid, static_cast<int>(mbf.skel.size()));
    const int sign = (p.sub_lo == sub) ? 1 : -1;
    const int plane_cell = (p.sub_lo == sub) ? sg.dims()[p.axis] - 1 : 0;
    for (int f2 = 0; f2 < p.t_dims[1]; ++f2)
      for (int f1 = 0; f1 < p.t_dims[0]; ++f1) {
        std::array<int, 3> c{};
        c[p.axis] = plane_cell;
        c[p.t_axes[0]] = p.t_lo[0] + f1 - sg.box.lo[p.t_axes[0]];
        c[p.t_axes[1]] = p.t_lo[1] + f2 - sg.box.lo[p.t_axes[1]];
        mbf.skel.push_back({pid, f1 + p.t_dims[0] * f2, sign,
                            sg.localIndex(c[0], c[1], c[2])});
        const int gface = p.face_offset + f1 + p.t_dims[0] * f2;
        const double beta = (sign > 0) ? robin.beta_lo[gface] : robin.beta_hi[gface];
        const double kc = khat.component(p.axis)[sg.globalIndex(c[0], c[1], c[2])];
        beta_side.push_back(beta);
        t_eff.push_back(1.0 / (beta + h[p.axis] / (2.0 * kc)));
        face_basis.push_back(
            localBasisIndex(mbf.basis, space.basisOfFace(p, f1, f2)));
      }
  }
  const int n_skel = static_cast<int>(mbf.skel.size());

  SparseSystem sys = assemble(sg, khat, lp.bc, restrictCellData(f, dd.grid, sg.box));

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(sg.cells(), cols.total());
  rhs.col(cols.particularCol()) = sys.rhs;

  // Robin datum contributions: P_H = phi_k adds T_eff/h to the adjacent
  // cell's equation, U_H = phi_k adds -beta (n.n^l) phi_k via the same closure.
  for (int s = 0; s < n_skel; ++s) {
    const MbfSet::SkelFace& sf = mbf.skel[s];
    const double ha = h[dd.patches[sf.patch].axis];
    rhs(sf.cell, cols.pCol(face_basis[s])) += t_eff[s] / ha;
    rhs(sf.cell, cols.uCol(face_basis[s])) += t_eff[s] * (-beta_side[s] * sf.sign) / ha;
  }

  std::optional<int> pin;
  if (!sys.pressure_closure && n_skel == 0) pin = 0;  // single-domain fallback
  const Factorization fact(sys.A, pin, sys.pressure_closure || n_skel > 0);
  mbf.pressures = fact.solveMulti(rhs);

  // Oriented flux traces u.n from the Robin closure per column:
  // u.n_out = T_eff (p_cell - r); the datum r is nonzero for the two
  // columns whose basis function covers the face.
  mbf.traces.resize(n_skel, cols.total());
  for (int s = 0; s < n_skel; ++s) {
    const MbfSet::SkelFace& sf = mbf.skel[s];
    mbf.traces.row(s) = (sf.sign * t_eff[s]) * mbf.pressures.row(sf.cell);
    mbf.traces(s, cols.pCol(face_basis[s])) -= sf.sign * t_eff[s];
    mbf.traces(s, cols.uCol(face_basis[s])) += t_eff[s] * beta_side[s];
  }
  return mbf;
}

InterfaceSystem assembleInterface(const DomainDecomposition& dd,
                                  const InterfaceSpace& space,
                                  const RobinParams& robin,
                                  const std::vector<MbfSet>& mbfs) {
  if (static_cast<int>(mbfs.size()) != dd.subCount())
    throw std::invalid_argument("one MbfSet per subdomain is required");
  for (const MbfSet& m : mbfs)
    if (m.sub < 0) throw std::invalid_argument("missing MbfSet");

  InterfaceSystem sys;
  sys.n_basis = space.basis_count;
  const int n = space.basis_count;
  sys.b = Eigen::VectorXd::Zero(2 * n);
  std::vector<Eigen::Triplet<double>> trips;

  for (const Patch& p : dd.patches) {
    const double area = dd.grid.faceArea(p.axis);
    const std::array<const MbfSet*, 2> sides{&mbfs[p.sub_lo], &mbfs[p.sub_hi]};
    const std::array<int, 2> offs{sides[0]->spanOf(p.id), sides[1]->spanOf(p.id)};
    for (int fi = 0; fi < p.faceCount(); ++fi) {
      const int i = space.basisOfFace(p, fi % p.t_dims[0], fi / p.t_dims[0]);
      const int gface = p.face_offset + fi;
      const std::array<double, 2> beta{robin.beta_lo[gface], robin.beta_hi[gface]};
      for (int s = 0; s < 2; ++s) {
        const MbfSet& m = *sides[s];
        const double sigma = (s == 0) ? 1.0 : -1.0;
        const auto row = m.traces.row(offs[s] + fi);
        const int nb = m.basisCount();
        for (int c = 0; c < nb; ++c) {
          const int j = m.basis[c];
          trips.emplace_back(i, j, area * sigma * row(c));
          trips.emplace_back(n + i, j, area * beta[s] * row(c));
        }
        for (int c = 0; c < nb; ++c) {
          const int j = m.basis[c];
          trips.emplace_back(i, n + j, area * sigma * row(nb + c));
          trips.emplace_back(n + i, n + j, area * beta[s] * row(nb + c));
        }
        const double part = row(2 * nb);
        sys.b[i] -= area * sigma * part;
        sys.b[n + i] -= area * beta[s] * part;
      }
      trips.emplace_back(n + i, n + i, -area * (beta[0] + beta[1]));
    }
  }
  sys.A.resize(2 * n, 2 * n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

Eigen::VectorXd solveInterface(const InterfaceSystem& system, bool pin_first) {
  if (system.n_basis == 0) return Eigen::VectorXd();
  if (!pin_first) {
    // The only nullspace the coupling system can develop is the constant
    // pressure mode (all-Neumann outer problem); detect it directly.
    Eigen::VectorXd const_p = Eigen::VectorXd::Zero(2 * system.n_basis);
    const_p.head(system.n_basis).setOnes();
    double scale = 0.0;
    for (int c = 0; c < system.n_basis; ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, c); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
    if ((system.A * const_p).cwiseAbs().maxCoeff() <= 1e-10 * scale)
      throw std::runtime_error(
          "interface system is singular (constant pressure mode); "
          "pin the first pressure coefficient");
  }
  const LuFactorization lu(system.A,
                           pin_first ? std::optional<int>(0) : std::nullopt);
  Eigen::VectorXd x = lu.solve(system.b);
  const double bnorm = system.b.norm();
  const double res = (system.A * x - system.b).norm();
  if (bnorm > 0.0 && !(res <= 1e-10 * bnorm))
    throw std::runtime_error("interface solve residual " + std::to_string(res) +
                             " exceeds 1e-10 * ||b|| = " +
                             std::to_string(1e-10 * bnorm));
  return x;
}

MultiscaleSolution reconstruct(const DomainDecomposition& dd,
                               const InterfaceSpace& space,
                               const RobinParams& robin,
                               const std::vector<MbfSet>& mbfs,
                               const Eigen::VectorXd& coeffs,
                               const PermeabilityField& khat,
                               const BoundarySpec& bc, const WorkerPool& pool) {
  const int n = space.basis_count;
  if (coeffs.size() != 2 * n)
    throw std::invalid_argument("coefficient vector must have 2 N_V entries");

  MultiscaleSolution sol;
  sol.coeffs = coeffs;
  sol.pressure.setZero(dd.grid.cellCount());
  sol.flux.resize(dd.grid.dims);
  sol.skel_lo.setZero(dd.skeleton_faces);
  sol.skel_hi.setZero(dd.skeleton_faces);

  pool.parallelFor(dd.subCount(), [&](int s) {
    const MbfSet& m = mbfs[s];
    const int nb = m.basisCount();
    Eigen::VectorXd c(2 * nb + 1);
    for (int k = 0; k < nb; ++k) {
      c[k] = coeffs[m.basis[k]];
      c[nb + k] = coeffs[n + m.basis[k]];
    }
    c[2 * nb] = 1.0;

    const Eigen::VectorXd p_local = m.pressures * c;
    const Eigen::VectorXd t_local = m.traces * c;

    const LocalProblem lp = buildLocalProblem(dd, robin, bc, s);
    const Subgrid& sg = lp.sub;
    const Box& box = sg.box;
    for (int k = 0; k < box.dims[2]; ++k)
      for (int j = 0; j < box.dims[1]; ++j)
        for (int i = 0; i < box.dims[0]; ++i)
          sol.pressure[dd.grid.cellIndex(box.lo[0] + i, box.lo[1] + j,
                                         box.lo[2] + k)] =
              p_local[box.localIndex(i, j, k)];

    // Interior and exterior faces; skeleton faces come from the traces.
    const FaceFluxField local = recoverFluxes(sg, khat, lp.bc, p_local);
    for (int a = 0; a < 3; ++a) {
      std::array<int, 3> fdims = box.dims;
      fdims[a] += 1;
      std::array<int, 3> fc;
      for (fc[2] = 0; fc[2] < fdims[2]; ++fc[2])
        for (fc[1] = 0; fc[1] < fdims[1]; ++fc[1])
          for (fc[0] = 0; fc[0] < fdims[0]; ++fc[0]) {
            const bool lo_skel = fc[a] == 0 && box.lo[a] > 0;
            const bool hi_skel = fc[a] == box.dims[a] &&
                                 box.lo[a] + box.dims[a] < dd.grid.dims[a];
            if (lo_skel || hi_skel) continue;
            sol.flux.component(a)[sol.flux.faceIndex(a, box.lo[0] + fc[0],
                                                     box.lo[1] + fc[1],
                                                     box.lo[2] + fc[2])] =
                local.component(a)[local.faceIndex(a, fc[0], fc[1], fc[2])];
          }
    }
    for (std::size_t sf = 0; sf < m.skel.size(); ++sf) {
      const MbfSet::SkelFace& face = m.skel[sf];
      const int gface = dd.patches[face.patch].face_offset + face.face;
      if (face.sign > 0)
        sol.skel_lo[gface] = t_local[sf];
      else
        sol.skel_hi[gface] = t_local[sf];
    }
  });

  // Skeleton faces of the single-valued field carry the side average.
  for (const Patch& p : dd.patches) {
    for (int f2 = 0; f2 < p.t_dims[1]; ++f2)
      for (int f1 = 0; f1 < p.t_dims[0]; ++f1) {
        const int gface = p.face_offset + f1 + p.t_dims[0] * f2;
        std::array<int, 3> fc{};
        fc[p.axis] = p.plane;
        fc[p.t_axes[0]] = p.t_lo[0] + f1;
        fc[p.t_axes[1]] = p.t_lo[1] + f2;
        sol.flux.component(p.axis)[sol.flux.faceIndex(p.axis, fc[0], fc[1], fc[2])] =
            0.5 * (sol.skel_lo[gface] + sol.skel_hi[gface]);
      }
  }
  return sol;
}

MultiscaleSolution solveMrcm(const DomainDecomposition& dd,
                             const InterfaceSpace& space,
                             const PermeabilityField& khat,
                             const BoundarySpec& bc, const CellField& f,
                             double alpha, const WorkerPool& pool) {
  StageTimings timings;
  StopWatch watch;
  const RobinParams robin = computeRobinParams(dd, khat, alpha);

  std::vector<MbfSet> mbfs(dd.subCount());
  watch.restart();
  pool.parallelFor(dd.subCount(), [&](int s) {
    mbfs[s] = computeMbfs(dd, space, robin, khat, bc, f, s);
  });
  timings.add("mbfs", watch.seconds());

  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(2 * space.basis_count);
  if (space.basis_count > 0) {
    watch.restart();
    const InterfaceSystem system = assembleInterface(dd, space, robin, mbfs);
    timings.add("interface_assembly", watch.seconds());
    watch.restart();
    coeffs = solveInterface(system, !bc.hasPressureClosure());
    timings.add("interface_solve", watch.seconds());
  }

  watch.restart();
  MultiscaleSolution sol =
      reconstruct(dd, space, robin, mbfs, coeffs, khat, bc, pool);
  timings.add("reconstruct", watch.seconds());
  sol.timings = timings;
  return sol;
}

FineSolution solveFine(const StructuredGrid& grid, const PermeabilityField& khat,
                       const BoundarySpec& bc, const CellField& f,
                       FineSolver choice, const KrylovConfig& krylov_config,
                       long unknown_cap) {
  FineSolution out;
  StopWatch watch;
  const Subgrid sg = Subgrid::whole(grid);
  SparseSystem sys = assemble(sg, khat, bc, f);
  out.timings.add("fine_assembly", watch.seconds());

  const bool needs_pin = !sys.pressure_closure;
  if (needs_pin) {
    // pure Neumann: the constant nullvector demands a balanced right-hand
    // side, otherwise no discrete solution exists
    const double imbalance = std::abs(sys.rhs.sum());
    const double scale = sys.rhs.cwiseAbs().sum();
    if (scale > 0.0 && imbalance > 1e-10 * scale)
      throw std::runtime_error(
          "pure-Neumann system with incompatible sources: net imbalance " +
          std::to_string(imbalance) + " vs scale " + std::to_string(scale));
  }
  if (choice == FineSolver::Direct) {
    if (grid.cellCount() > unknown_cap)
      throw std::runtime_error(
          "direct fine solve refused: " + std::to_string(grid.cellCount()) +
          " unknowns exceed the cap of " + std::to_string(unknown_cap) +
          " (raise the cap or use the Krylov path)");
    watch.restart();
    const Factorization fact =
        factorize(sys, needs_pin ? std::optional<int>(0) : std::nullopt);
    out.timings.add("fine_factor", watch.seconds());
    watch.restart();
    out.pressure = fact.solve(sys.rhs);
    out.timings.add("fine_solve", watch.seconds());
  } else {
    watch.restart();
    if (needs_pin) {
      const Eigen::SparseMatrix<double> pinned = pinMatrix(sys.A, 0);
      Eigen::VectorXd b = sys.rhs;
      b[0] = 0.0;
      out.krylov = krylovSolve(pinned, b, krylov_config);
    } else {
      out.krylov = krylovSolve(sys.A, sys.rhs, krylov_config);
    }
    if (!out.krylov.converged)
      throw std::runtime_error(
          "Krylov fine solve did not converge: relative residual " +
          std::to_string(out.krylov.rel_residual) + " after " +
          std::to_string(out.krylov.iterations) + " iterations");
    out.pressure = out.krylov.x;
    out.timings.add("fine_krylov", watch.seconds());
  }

  watch.restart();
  out.flux = recoverFluxes(sg, khat, bc, out.pressure);
  out.timings.add("fine_flux", watch.seconds());
  return out;
}

}  // namespace mrcm
