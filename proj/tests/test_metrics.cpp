// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/metrics.hpp"
#include "mrcm/perm.hpp"
#include "mrcm/scenario.hpp"

#include <doctest.h>

using namespace mrcm;

namespace {

CellField hashField(int n, std::uint64_t seed) {
  CellField v(n);
  for (int c = 0; c < n; ++c) {
    seed = seed * 6364136223846793005ull + 1442695040888963407ull;
    v[c] = static_cast<double>(seed >> 11) * 0x1.0p-53 - 0.5;
  }
  return v;
}

FaceFluxField hashFlux(const StructuredGrid& grid, std::uint64_t seed) {
  FaceFluxField u(grid.dims);
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd& c = u.component(a);
    const CellField h = hashField(static_cast<int>(c.size()), seed + a);
    c = h;
  }
  return u;
}

}  // namespace

TEST_CASE("pressure error basics") {
  const StructuredGrid grid = makeGrid({4, 4, 2}, {1, 1, 1});
  const CellField p = hashField(grid.cellCount(), 1);

  CHECK(pressureError(grid, p, p, false) == 0.0);

  CellField shifted = p;
  shifted.array() += 3.7;
  CHECK(pressureError(grid, shifted, p, true) <= 1e-12);

  CellField doubled = 2.0 * p;
  CHECK(pressureError(grid, doubled, p, false) == doctest::Approx(1.0));

  CHECK_THROWS_AS(pressureError(grid, p, CellField::Zero(grid.cellCount()), false),
                  std::invalid_argument);
}

TEST_CASE("velocity error basics") {
  const StructuredGrid grid = makeGrid({5, 3, 2}, {2, 1, 1});
  const PermeabilityField k = channelField(grid, 5, 100.0);
  const FaceFluxField u = hashFlux(grid, 3);

  CHECK(velocityError(grid, u, u, k) == 0.0);

  FaceFluxField doubled = u;
  for (int a = 0; a < 3; ++a) doubled.component(a) *= 2.0;
  CHECK(velocityError(grid, doubled, u, k) == doctest::Approx(1.0));
}

TEST_CASE("norm axioms on random fields") {
  const StructuredGrid grid = makeGrid({6, 4, 3}, {2, 3, 1});
  const PermeabilityField k = channelField(grid, 7, 1e3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CellField a = hashField(grid.cellCount(), seed);
    const CellField b = hashField(grid.cellCount(), seed + 100);
    CHECK(pressureNorm(grid, a + b) <=
          pressureNorm(grid, a) + pressureNorm(grid, b) + 1e-14);
    CHECK(pressureNorm(grid, -2.5 * a) ==
          doctest::Approx(2.5 * pressureNorm(grid, a)).epsilon(1e-13));

    const FaceFluxField ua = hashFlux(grid, seed);
    const FaceFluxField ub = hashFlux(grid, seed + 50);
    FaceFluxField sum = ua;
    FaceFluxField scaled = ua;
    for (int ax = 0; ax < 3; ++ax) {
      sum.component(ax) += ub.component(ax);
      scaled.component(ax) *= -3.0;
    }
    CHECK(velocityNorm(grid, sum, k) <=
          velocityNorm(grid, ua, k) + velocityNorm(grid, ub, k) + 1e-14);
    CHECK(velocityNorm(grid, scaled, k) ==
          doctest::Approx(3.0 * velocityNorm(grid, ua, k)).epsilon(1e-13));
  }
}

TEST_CASE("skeleton jumps vanish in the fine-space limit") {
  const StructuredGrid grid = makeGrid({8, 8, 4}, {1200.0, 2200.0, 120.0});
  const PermeabilityField k = channelField(grid, 13, 100.0);
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  const CellField f = wellSource(grid, wells);
  const WorkerPool pool(1);
  const DomainDecomposition dd = decompose(grid, {2, 2, 2});

  const InterfaceSpace fine_space = buildInterfaceSpace(dd, {1, 1, 1});
  const MultiscaleSolution fine_sol =
      solveMrcm(dd, fine_space, k, noFlowBc(), f, 1.0, pool);
  const SkeletonJumps fine_jumps = skeletonJumps(dd, k, fine_sol);
  const double uscale = fine_sol.flux.maxAbs();
  const double prange =
      fine_sol.pressure.maxCoeff() - fine_sol.pressure.minCoeff();
  CHECK(fine_jumps.max_flux_jump <= 1e-9 * uscale);
  CHECK(fine_jumps.max_pressure_jump <= 1e-9 * prange);

  // a genuinely coarse space leaves visible jumps
  const InterfaceSpace coarse = buildInterfaceSpace(dd, dd.sub_cells);
  const MultiscaleSolution coarse_sol =
      solveMrcm(dd, coarse, k, noFlowBc(), f, 1.0, pool);
  const SkeletonJumps coarse_jumps = skeletonJumps(dd, k, coarse_sol);
  CHECK(coarse_jumps.max_flux_jump > 1e-6 * uscale);
}

TEST_CASE("alpha limits control which field is continuous") {
  // isotropic subdomains keep the O(1/alpha) jump prefactor near one
  const StructuredGrid grid = makeGrid({16, 16, 16}, {800.0, 800.0, 800.0});
  const PermeabilityField k = channelField(grid, 19, 100.0);
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  const CellField f = wellSource(grid, wells);
  const WorkerPool pool(1);
  const DomainDecomposition dd = decompose(grid, {2, 2, 2});
  const InterfaceSpace space = buildInterfaceSpace(dd, {2, 2, 2});

  const MultiscaleSolution big =
      solveMrcm(dd, space, k, noFlowBc(), f, 1e6, pool);
  const SkeletonJumps bj = skeletonJumps(dd, k, big);
  CHECK(bj.max_flux_jump <= 1e-6 * big.flux.maxAbs());

  const MultiscaleSolution small =
      solveMrcm(dd, space, k, noFlowBc(), f, 1e-6, pool);
  const SkeletonJumps sj = skeletonJumps(dd, k, small);
  const double prange = small.pressure.maxCoeff() - small.pressure.minCoeff();
  CHECK(sj.max_pressure_jump <= 1e-3 * prange);
}
