// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/perm.hpp"
#include "mrcm/scenario.hpp"
#include "mrcm/io.hpp"
#include "mrcm/transport.hpp"

#include <doctest.h>

using namespace mrcm;

TEST_CASE("fractional flow and total mobility endpoints") {
  const FluidProps props{0.5, 1.5};  // M = 3
  CHECK(fractionalFlow(0.0, props) == 0.0);
  CHECK(fractionalFlow(1.0, props) == 1.0);
  CHECK(totalMobility(0.0, props) == doctest::Approx(1.0 / props.mu_o));
  CHECK(totalMobility(1.0, props) == doctest::Approx(1.0 / props.mu_w));

  // phi(0.5) = M/(M+1)
  const double m = props.mu_o / props.mu_w;
  CHECK(fractionalFlow(0.5, props) == doctest::Approx(m / (m + 1.0)));

  CHECK_THROWS_AS(fractionalFlow(-0.1, props), std::invalid_argument);
  CHECK_THROWS_AS(totalMobility(1.1, props), std::invalid_argument);
  CHECK_THROWS_AS(totalMobility(0.5, FluidProps{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("fractional flow derivative matches finite differences") {
  const FluidProps props{1.0, 2.0};
  for (double s : {0.05, 0.3, 0.5, 0.77, 0.95}) {
    const double eps = 1e-6;
    const double fd =
        (fractionalFlow(s + eps, props) - fractionalFlow(s - eps, props)) /
        (2.0 * eps);
    CHECK(fractionalFlowDerivative(s, props) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("CFL time step") {
  const StructuredGrid grid = makeGrid({4, 4, 1}, {4.0, 4.0, 1.0});
  const FluidProps props{1.0, 1.0};  // M = 1
  CellField s = CellField::Constant(grid.cellCount(), 0.5);

  SUBCASE("no flow returns the cap") {
    FaceFluxField u(grid.dims);
    CHECK(cflTimestep(grid, u, s, props, 0.9, 123.0) == 123.0);
  }

  SUBCASE("M=1, S=0.5, |u|=1, h=1, sigma=1 gives 1/phi'(0.5)") {
    FaceFluxField u(grid.dims);
    u.u1.setConstant(1.0);
    const double dt = cflTimestep(grid, u, s, props, 1.0, 1e9);
    // phi'(0.5) = 8M/(M+1)^2 = 2 for M=1 (checked against the derivative)
    CHECK(dt == doctest::Approx(1.0 / fractionalFlowDerivative(0.5, props)));
    CHECK(dt == doctest::Approx(0.5));
  }

  SUBCASE("doubling the flux halves the step") {
    FaceFluxField u(grid.dims);
    u.u1.setConstant(0.7);
    u.u2.setConstant(-0.2);
    const double dt1 = cflTimestep(grid, u, s, props, 0.9, 1e9);
    u.u1 *= 2.0;
    u.u2 *= 2.0;
    const double dt2 = cflTimestep(grid, u, s, props, 0.9, 1e9);
    CHECK(dt2 == doctest::Approx(0.5 * dt1));
  }
}

TEST_CASE("constant states are preserved exactly") {
  const StructuredGrid grid = makeGrid({6, 5, 4}, {3.0, 2.5, 2.0});
  const FluidProps props{1.0, 2.0};
  const WorkerPool pool(1);
  FaceFluxField u(grid.dims);
  u.u1.setConstant(0.8);   // uniform, exactly divergence-free
  u.u3.setConstant(-0.3);
  const CellField f = CellField::Zero(grid.cellCount());
  const CellField s = CellField::Constant(grid.cellCount(), 0.37);
  const CellField next = advanceSaturation(grid, s, u, f, 0.05, props, pool);
  CHECK((next - s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero velocity with an injector source grows only injector cells") {
  const StructuredGrid grid = makeGrid({5, 5, 1}, {5, 5, 1});
  const FluidProps props{1.0, 2.0};
  const WorkerPool pool(1);
  FaceFluxField u(grid.dims);
  CellField f = CellField::Zero(grid.cellCount());
  f[grid.cellIndex(2, 2, 0)] = 0.4;
  const CellField s = CellField::Zero(grid.cellCount());
  const CellField next = advanceSaturation(grid, s, u, f, 0.1, props, pool);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      const double v = next[grid.cellIndex(i, j, 0)];
      if (i == 2 && j == 2)
        CHECK(v == doctest::Approx(0.04));
      else
        CHECK(v == 0.0);
    }
}

TEST_CASE("1D Buckley-Leverett shock matches the characteristics solution") {
  // M = 2: the Welge tangent construction gives the front saturation S*
  // solving phi'(S) S = phi(S); the shock travels at phi(S*)/S* times u.
  const int n = 200;
  const StructuredGrid grid = makeGrid({n, 1, 1}, {1.0 * n, 1.0, 1.0});
  const FluidProps props{1.0, 2.0};
  const WorkerPool pool(1);

  // independent oracle: bisect phi'(S)S - phi(S) = 0 on (0.5, 1)
  double lo = 0.5, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g =
        fractionalFlowDerivative(mid, props) * mid - fractionalFlow(mid, props);
    (g > 0 ? lo : hi) = mid;
  }
  const double s_star = 0.5 * (lo + hi);
  CHECK(s_star == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  const double shock_speed = fractionalFlow(s_star, props) / s_star;

  FaceFluxField u(grid.dims);
  u.u1.setConstant(1.0);
  CellField s = CellField::Zero(grid.cellCount());
  const int front0 = 10;
  for (int i = 0; i < front0; ++i) s[i] = 1.0;

  const CellField f = CellField::Zero(grid.cellCount());
  double t = 0.0;
  const double t_end = 60.0;
  while (t < t_end) {
    double dt = cflTimestep(grid, u, s, props, 0.9, 1.0);
    dt = std::min(dt, t_end - t);
    s = advanceSaturation(grid, s, u, f, dt, props, pool);
    s[0] = 1.0;  // inflow column held at water
    t += dt;
  }

  // locate the discrete front: last cell above S*/2
  int front_cell = 0;
  for (int i = 0; i < n; ++i)
    if (s[i] > 0.5 * s_star) front_cell = i;
  const double expected = front0 + shock_speed * t_end;
  CHECK(std::abs((front_cell + 0.5) - expected) <= 2.0);

  // saturations stay in bounds, shape is monotone behind the front
  CHECK(s.minCoeff() >= 0.0);
  CHECK(s.maxCoeff() <= 1.0);
}

TEST_CASE("update throws on a clear CFL violation") {
  const StructuredGrid grid = makeGrid({20, 1, 1}, {20.0, 1.0, 1.0});
  const FluidProps props{1.0, 2.0};
  const WorkerPool pool(1);
  FaceFluxField u(grid.dims);
  u.u1.setConstant(1.0);
  CellField s = CellField::Zero(grid.cellCount());
  for (int i = 0; i < 10; ++i) s[i] = 1.0;
  const CellField f = CellField::Zero(grid.cellCount());
  CHECK_THROWS_WITH_AS(advanceSaturation(grid, s, u, f, 10.0, props, pool),
                       doctest::Contains("CFL"), std::runtime_error);
}

TEST_CASE("discrete water mass balance with conservative flux") {
  // one Darcy solve of a five-spot, then a transport step: the change in
  // water volume equals injected minus produced
  const StructuredGrid grid = makeGrid({12, 12, 4}, {120.0, 120.0, 40.0});
  const PermeabilityField k = channelField(grid, 3, 50.0);
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  const CellField f = wellSource(grid, wells);
  const FluidProps props{1.0, 2.0};
  const WorkerPool pool(1);

  CellField s = CellField::Zero(grid.cellCount());
  applyInjectorSaturation(grid, wells, s);
  // advance a few steps so the front leaves the injector cells
  const PermeabilityField khat = mobilityScaled(k, s, props);
  const FineSolution fine = solveFine(grid, khat, noFlowBc(), f);
  for (int step = 0; step < 5; ++step) {
    const double dt = cflTimestep(grid, fine.flux, s, props, 0.9, 1e9);
    s = advanceSaturation(grid, s, fine.flux, f, dt, props, pool);
    applyInjectorSaturation(grid, wells, s);
  }

  const double dt = cflTimestep(grid, fine.flux, s, props, 0.9, 1e9);
  const CellField next = advanceSaturation(grid, s, fine.flux, f, dt, props, pool);

  const double dv = (next - s).sum() * grid.cellVolume();
  double injected = 0.0, produced = 0.0;
  for (int c = 0; c < grid.cellCount(); ++c) {
    if (f[c] > 0.0) injected += dt * f[c] * grid.cellVolume();
    if (f[c] < 0.0)
      produced += -dt * f[c] * fractionalFlow(s[c], props) * grid.cellVolume();
  }
  // injector cells sit at S=1 so the pure-water source term stays active
  CHECK(dv == doctest::Approx(injected - produced).epsilon(1e-10));
}

TEST_CASE("saturation bounds hold over many steps on a solver flux field") {
  const StructuredGrid grid = makeGrid({10, 10, 2}, {10.0, 10.0, 2.0});
  const PermeabilityField k = channelField(grid, 9, 1e3);
  const BoundarySpec bc = pressureDriveBc(0, 1.0, 0.0);
  const FineSolution fine = solveFine(grid, k, bc, {});
  const FluidProps props{1.0, 2.0};
  const WorkerPool pool(1);

  // random initial saturation from a deterministic hash
  CellField s(grid.cellCount());
  std::uint64_t state = 99;
  for (int c = 0; c < s.size(); ++c) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    s[c] = static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  const CellField f = CellField::Zero(grid.cellCount());
  for (int step = 0; step < 300; ++step) {
    const double dt = cflTimestep(grid, fine.flux, s, props, 0.9, 1e9);
    s = advanceSaturation(grid, s, fine.flux, f, dt, props, pool);
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 1.0);
  }
}

TEST_CASE("saturation update is independent of the tiling") {
  const StructuredGrid grid = makeGrid({9, 7, 6}, {3.0, 2.0, 2.0});
  const PermeabilityField k = channelField(grid, 21, 100.0);
  const FineSolution fine = solveFine(grid, k, pressureDriveBc(2, 1.0, 0.0), {});
  const FluidProps props{1.0, 2.0};
  CellField s(grid.cellCount());
  for (int c = 0; c < s.size(); ++c) s[c] = 0.5 + 0.4 * std::sin(0.3 * c);
  const CellField f = CellField::Zero(grid.cellCount());
  const double dt = cflTimestep(grid, fine.flux, s, props, 0.9, 1e9);
  const CellField one = advanceSaturation(grid, s, fine.flux, f, dt, props, WorkerPool(1));
  for (int workers : {2, 4, 8}) {
    const CellField w =
        advanceSaturation(grid, s, fine.flux, f, dt, props, WorkerPool(workers));
    CHECK((one - w).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("production metrics") {
  const StructuredGrid grid = makeGrid({12, 12, 2}, {120.0, 120.0, 20.0});
  const PermeabilityField k = uniformPermeability(grid, 1.0);
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  const CellField f = wellSource(grid, wells);
  const FluidProps props{1.0, 2.0};
  const FineSolution fine = solveFine(grid, k, noFlowBc(), f);

  SUBCASE("pure oil near producers") {
    const CellField s = CellField::Zero(grid.cellCount());
    const ProductionSample sample =
        productionMetrics(grid, fine.flux, s, wells, props);
    CHECK(sample.oil_fraction == doctest::Approx(1.0));
    for (double w : sample.watercut) CHECK(w == doctest::Approx(0.0));
  }

  SUBCASE("pure water everywhere") {
    const CellField s = CellField::Ones(grid.cellCount());
    const ProductionSample sample =
        productionMetrics(grid, fine.flux, s, wells, props);
    CHECK(sample.oil_fraction == doctest::Approx(0.0));
    for (double w : sample.watercut) CHECK(w == doctest::Approx(1.0));
  }

  SUBCASE("zero flux flags zero production") {
    FaceFluxField calm(grid.dims);
    const CellField s = CellField::Zero(grid.cellCount());
    const ProductionSample sample = productionMetrics(grid, calm, s, wells, props);
    CHECK(sample.zero_production);
    CHECK(sample.oil_fraction == 0.0);
  }
}

TEST_CASE("T_PVI accumulates injected pore volumes") {
  // constant injection rate q: T_PVI(t) = q t / V_p by definition
  const StructuredGrid grid = makeGrid({12, 12, 2}, {120.0, 120.0, 20.0});
  const PermeabilityField k = uniformPermeability(grid, 1.0);
  const Wells wells = buildFiveSpot(grid, 0.5, {0.25, 0.25, 0.25, 0.25});
  ImpesConfig impes;
  impes.skip = 4;
  impes.t_end_pvi = 0.02;
  const ImpesResult res = runImpes(grid, k, noFlowBc(), wells, FluidProps{1.0, 2.0},
                                   impes, DarcyConfig{}, WorkerPool(1));
  CHECK(res.record.samples.back().t_pvi == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(res.record.samples.front().t_pvi == 0.0);
  for (std::size_t i = 1; i < res.record.samples.size(); ++i)
    CHECK(res.record.samples[i].t_pvi >= res.record.samples[i - 1].t_pvi);
}

TEST_CASE("a failing Darcy solve aborts with a state dump") {
  const StructuredGrid grid = makeGrid({8, 8, 2}, {80.0, 80.0, 20.0});
  const PermeabilityField k = channelField(grid, 4, 1e4);
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  ImpesConfig impes;
  impes.t_end_pvi = 0.05;
  impes.abort_dump_prefix = "abort_test";
  DarcyConfig darcy;
  darcy.fine_solver = FineSolver::Krylov;
  darcy.krylov.max_it = 1;  // cannot converge
  darcy.krylov.tol = 1e-12;
  CHECK_THROWS_WITH_AS(runImpes(grid, k, noFlowBc(), wells, FluidProps{1, 2},
                                impes, darcy, WorkerPool(1)),
                       doctest::Contains("state dumped"), std::runtime_error);
  const CellField s = loadCellField("abort_test_saturation.mrcmfield", grid.dims);
  CHECK(s.maxCoeff() == 1.0);  // injector cells were live when it aborted
  std::remove("abort_test_saturation.mrcmfield");
}

TEST_CASE("IMPES stationarity: no injector means no evolution") {
  const StructuredGrid grid = makeGrid({8, 8, 2}, {8, 8, 2});
  const PermeabilityField k = uniformPermeability(grid, 1.0);
  Wells wells;  // empty
  ImpesConfig impes;
  impes.t_end_pvi = 0.1;
  CHECK_THROWS_WITH_AS(runImpes(grid, k, noFlowBc(), wells, FluidProps{1, 2}, impes,
                                DarcyConfig{}, WorkerPool(1)),
                       doctest::Contains("no injection"), std::runtime_error);
}

TEST_CASE("IMPES skipping study: C=1 vs C=2 stay close on a smooth case") {
  const StructuredGrid grid = makeGrid({10, 10, 2}, {100.0, 100.0, 20.0});
  const PermeabilityField k = uniformPermeability(grid, 1.0);
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  const FluidProps props{1.0, 2.0};

  auto run = [&](int skip) {
    ImpesConfig impes;
    impes.skip = skip;
    impes.t_end_pvi = 0.1;
    return runImpes(grid, k, noFlowBc(), wells, props, impes, DarcyConfig{},
                    WorkerPool(1));
  };
  const ImpesResult r1 = run(1);
  const ImpesResult r2 = run(2);

  // compare oil fractions on the sample grid of the coarser run
  auto interp = [](const ProductionRecord& rec, double t) {
    for (std::size_t i = 1; i < rec.samples.size(); ++i)
      if (rec.samples[i].t_pvi >= t) {
        const auto& a = rec.samples[i - 1];
        const auto& b = rec.samples[i];
        const double w =
            (b.t_pvi > a.t_pvi) ? (t - a.t_pvi) / (b.t_pvi - a.t_pvi) : 0.0;
        return a.oil_fraction + w * (b.oil_fraction - a.oil_fraction);
      }
    return rec.samples.back().oil_fraction;
  };
  double max_diff = 0.0;
  for (double t = 0.0; t <= 0.1; t += 0.01)
    max_diff = std::max(max_diff, std::abs(interp(r1.record, t) - interp(r2.record, t)));
  CHECK(max_diff < 0.01);  // < 1% of the oil-fraction range
}
