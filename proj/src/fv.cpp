// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/fv.hpp"

#include <cmath>
#include <vector>

namespace mrcm {

namespace {

void checkSide(const Subgrid& sub, const SideBc& side, int axis) {
  const int nf = sub.sideFaceCount(axis);
  if (side.data.size() != 1 && side.data.size() != nf)
    throw std::invalid_argument("incomplete boundary data on side of axis " +
                                std::to_string(axis) + ": expected 1 or " +
                                std::to_string(nf) + " values, got " +
                                std::to_string(side.data.size()));
  if (side.kind == BcKind::Robin) {
    if (side.beta.size() != 1 && side.beta.size() != nf)
      throw std::invalid_argument("incomplete Robin beta on side of axis " +
                                  std::to_string(axis));
    if ((side.beta.array() <= 0.0).any() || !side.beta.array().isFinite().all())
      throw std::invalid_argument("Robin beta must be positive and finite");
  }
}

int sideFaceIndex(const Subgrid& sub, int axis, const std::array<int, 3>& c) {
  auto t = tangentialAxes(axis);
  return c[t[0]] + sub.dims()[t[0]] * c[t[1]];
}

}  // namespace

double faceTransmissibility(double ka, double kb, double h) {
  if (!(ka > 0.0) || !(kb > 0.0) || !(h > 0.0) || !std::isfinite(ka) ||
      !std::isfinite(kb) || !std::isfinite(h))
    throw std::invalid_argument("faceTransmissibility requires positive finite inputs");
  return 2.0 * ka * kb / (ka + kb) / (h * h);
}

SparseSystem assemble(const Subgrid& sub, const PermeabilityField& khat,
                      const BoundarySpec& bc, const Eigen::VectorXd& f_local) {
  const auto& d = sub.dims();
  const auto& h = sub.h();
  const int n = sub.cells();
  if (f_local.size() != 0 && f_local.size() != n)
    throw std::invalid_argument("source vector size mismatch");
  for (int a = 0; a < 3; ++a) {
    checkSide(sub, bc.side(a, 0), a);
    checkSide(sub, bc.side(a, 1), a);
  }

  SparseSystem sys;
  sys.dims = d;
  sys.pressure_closure = bc.hasPressureClosure();
  sys.rhs = f_local.size() ? f_local : Eigen::VectorXd::Zero(n);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(7) * n);

  std::array<int, 3> c;
  for (c[2] = 0; c[2] < d[2]; ++c[2])
    for (c[1] = 0; c[1] < d[1]; ++c[1])
      for (c[0] = 0; c[0] < d[0]; ++c[0]) {
        const int lc = sub.localIndex(c[0], c[1], c[2]);
        const int gc = sub.globalIndex(c[0], c[1], c[2]);
        for (int a = 0; a < 3; ++a) {
          const Eigen::ArrayXd& ka = khat.component(a);
          const double kc = ka[gc];
          if (!(kc > 0.0) || !std::isfinite(kc))
            throw std::invalid_argument("mobility-scaled permeability must be positive");

          // interior face toward the high side, added once per face
          if (c[a] + 1 < d[a]) {
            std::array<int, 3> nb = c;
            nb[a] += 1;
            const int ln = sub.localIndex(nb[0], nb[1], nb[2]);
            const double kn = ka[sub.globalIndex(nb[0], nb[1], nb[2])];
            if (!(kn > 0.0) || !std::isfinite(kn))
              throw std::invalid_argument("mobility-scaled permeability must be positive");
            const double t = faceTransmissibility(kc, kn, h[a]);
            trips.emplace_back(lc, lc, t);
            trips.emplace_back(ln, ln, t);
            trips.emplace_back(lc, ln, -t);
            trips.emplace_back(ln, lc, -t);
          }
          for (int high = 0; high < 2; ++high) {
            const bool on_boundary = high ? (c[a] == d[a] - 1) : (c[a] == 0);
            if (!on_boundary) continue;
            const SideBc& side = bc.side(a, high);
            const int face = sideFaceIndex(sub, a, c);
            switch (side.kind) {
              case BcKind::Dirichlet: {
                const double t_half = 2.0 * kc / (h[a] * h[a]);
                trips.emplace_back(lc, lc, t_half);
                sys.rhs[lc] += t_half * side.dataAt(face);
                break;
              }
              case BcKind::Neumann:
                sys.rhs[lc] -= side.dataAt(face) / h[a];
                break;
              case BcKind::Robin: {
                // u.n_out = (p_cell - r)/(beta + 1/T'), T' = 2 khat / h
                const double t_eff = 1.0 / (side.betaAt(face) + h[a] / (2.0 * kc));
                trips.emplace_back(lc, lc, t_eff / h[a]);
                sys.rhs[lc] += t_eff * side.dataAt(face) / h[a];
                break;
              }
            }
          }
        }
      }

  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

FaceFluxField recoverFluxes(const Subgrid& sub, const PermeabilityField& khat,
                            const BoundarySpec& bc, const Eigen::VectorXd& p_local) {
  const auto& d = sub.dims();
  const auto& h = sub.h();
  if (p_local.size() != sub.cells())
    throw std::invalid_argument("pressure vector size mismatch");
  FaceFluxField flux(d);

  std::array<int, 3> c;
  for (c[2] = 0; c[2] < d[2]; ++c[2])
    for (c[1] = 0; c[1] < d[1]; ++c[1])
      for (c[0] = 0; c[0] < d[0]; ++c[0]) {
        const int lc = sub.localIndex(c[0], c[1], c[2]);
        const int gc = sub.globalIndex(c[0], c[1], c[2]);
        for (int a = 0; a < 3; ++a) {
          const Eigen::ArrayXd& ka = khat.component(a);
          const double kc = ka[gc];
          Eigen::VectorXd& u = flux.component(a);

          if (c[a] + 1 < d[a]) {
            std::array<int, 3> nb = c;
            nb[a] += 1;
            const double kn = ka[sub.globalIndex(nb[0], nb[1], nb[2])];
            const double ktilde = 2.0 * kc * kn / (kc + kn);
            std::array<int, 3> fc = c;
            fc[a] += 1;
            u[flux.faceIndex(a, fc[0], fc[1], fc[2])] =
                -ktilde * (p_local[sub.localIndex(nb[0], nb[1], nb[2])] - p_local[lc]) / h[a];
          }
          for (int high = 0; high < 2; ++high) {
            const bool on_boundary = high ? (c[a] == d[a] - 1) : (c[a] == 0);
            if (!on_boundary) continue;
            const SideBc& side = bc.side(a, high);
            const int face = sideFaceIndex(sub, a, c);
            const double sign = high ? 1.0 : -1.0;  // n_out vs +axis
            std::array<int, 3> fc = c;
            fc[a] += high;
            double out = 0.0;  // u . n_out
            switch (side.kind) {
              case BcKind::Dirichlet:
                out = (2.0 * kc / h[a]) * (p_local[lc] - side.dataAt(face));
                break;
              case BcKind::Neumann:
                out = side.dataAt(face);
                break;
              case BcKind::Robin:
                out = (p_local[lc] - side.dataAt(face)) /
                      (side.betaAt(face) + h[a] / (2.0 * kc));
                break;
            }
            u[flux.faceIndex(a, fc[0], fc[1], fc[2])] = sign * out;
          }
        }
      }
  return flux;
}

Eigen::VectorXd cellMassResidual(const Subgrid& sub, const FaceFluxField& flux,
                                 const Eigen::VectorXd& f_local) {
  const auto& d = sub.dims();
  const auto& h = sub.h();
  if (flux.dims != d) throw std::invalid_argument("flux dims mismatch");
  Eigen::VectorXd res = Eigen::VectorXd::Zero(sub.cells());
  std::array<int, 3> c;
  for (c[2] = 0; c[2] < d[2]; ++c[2])
    for (c[1] = 0; c[1] < d[1]; ++c[1])
      for (c[0] = 0; c[0] < d[0]; ++c[0]) {
        const int lc = sub.localIndex(c[0], c[1], c[2]);
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
          std::array<int, 3> fhi = c;
          fhi[a] += 1;
          div += (flux.component(a)[flux.faceIndex(a, fhi[0], fhi[1], fhi[2])] -
                  flux.component(a)[flux.faceIndex(a, c[0], c[1], c[2])]) / h[a];
        }
        res[lc] = div - (f_local.size() ? f_local[lc] : 0.0);
      }
  return res;
}

double residualScale(const Subgrid& sub, const FaceFluxField& flux,
                     const Eigen::VectorXd& f_local) {
  double s = f_local.size() ? f_local.cwiseAbs().maxCoeff() : 0.0;
  for (int a = 0; a < 3; ++a)
    if (flux.component(a).size() > 0)
      s += flux.component(a).cwiseAbs().maxCoeff() / sub.h()[a];
  return s;
}

}  // namespace mrcm
