// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/io.hpp"
#include "mrcm/postprocess.hpp"
#include "mrcm/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace mrcm;

struct CommonOpts {
  std::string config;
  std::string out_prefix = "out";
  int workers = 0;
};

Scenario loadScenario(const CommonOpts& opts) {
  Scenario sc = parseConfig(opts.config);
  if (opts.workers > 0) sc.workers = opts.workers;
  return sc;
}

struct Problem {
  StructuredGrid grid;
  PermeabilityField k;
  BoundarySpec bc;
  Wells wells;
  CellField f;
};

Problem buildProblem(const Scenario& sc) {
  Problem pb;
  pb.grid = scenarioGrid(sc);
  pb.k = buildPermeability(sc, pb.grid);
  pb.bc = buildBc(sc, pb.grid);
  if (sc.five_spot) {
    pb.wells = buildFiveSpot(pb.grid, sc.pvi_rate, sc.producer_split);
    pb.f = wellSource(pb.grid, pb.wells);
  }
  return pb;
}

void dumpFluxes(const std::string& prefix, const StructuredGrid& grid,
                const FaceFluxField& flux) {
  for (int a = 0; a < 3; ++a) {
    std::array<int, 3> fdims = grid.dims;
    fdims[a] += 1;
    dumpField(prefix + "_flux" + std::to_string(a + 1) + ".mrcmfield", fdims,
              flux.component(a));
  }
}

int cmdGenPerm(const CommonOpts& opts) {
  const Scenario sc = loadScenario(opts);
  const StructuredGrid grid = scenarioGrid(sc);
  const PermeabilityField k = buildPermeability(sc, grid);
  dumpPermeability(opts.out_prefix + "_perm.mrcmfield", grid.dims, k);
  std::cout << "wrote " << opts.out_prefix << "_perm.mrcmfield ("
            << grid.cellCount() << " cells, contrast "
            << k.maxCoeff() / k.minCoeff() << ")\n";
  return 0;
}

int cmdSolveFine(const CommonOpts& opts) {
  const Scenario sc = loadScenario(opts);
  const Problem pb = buildProblem(sc);
  const FineSolution sol = solveFine(pb.grid, pb.k, pb.bc, pb.f, sc.fine_solver,
                                     sc.krylov, sc.unknown_cap);
  dumpField(opts.out_prefix + "_pressure.mrcmfield", pb.grid.dims, sol.pressure);
  dumpFluxes(opts.out_prefix, pb.grid, sol.flux);
  writeTimingsCsv(opts.out_prefix + "_timings.csv", sol.timings, "fine");
  const Eigen::VectorXd res =
      cellMassResidual(Subgrid::whole(pb.grid), sol.flux, pb.f);
  std::cout << "fine solve: " << pb.grid.cellCount() << " cells, max residual "
            << res.cwiseAbs().maxCoeff() << "\n";
  return 0;
}

int cmdSolveMrcm(const CommonOpts& opts) {
  const Scenario sc = loadScenario(opts);
  const Problem pb = buildProblem(sc);
  const WorkerPool pool(sc.workers);
  const DomainDecomposition dd = decompose(pb.grid, sc.nd);
  std::array<int, 3> hbar = sc.hbar;
  for (int a = 0; a < 3; ++a)
    if (hbar[a] <= 0) hbar[a] = dd.sub_cells[a];
  const InterfaceSpace space = buildInterfaceSpace(dd, hbar);
  const MultiscaleSolution sol =
      solveMrcm(dd, space, pb.k, pb.bc, pb.f, sc.alpha, pool);
  const ConservativeFlux cons =
      conservativeReconstruction(dd, pb.k, pb.f, sol, pool);

  dumpField(opts.out_prefix + "_pressure.mrcmfield", pb.grid.dims, sol.pressure);
  dumpFluxes(opts.out_prefix, pb.grid, cons.flux);
  writeTimingsCsv(opts.out_prefix + "_timings.csv", sol.timings, "mrcm");
  const SkeletonJumps jumps = skeletonJumps(dd, pb.k, sol);
  std::cout << "mrcm solve: " << dd.subCount() << " subdomains, "
            << 2 * space.basis_count << " interface dofs, max flux jump "
            << jumps.max_flux_jump << ", max pressure jump "
            << jumps.max_pressure_jump << "\n";
  return 0;
}

int cmdCompare(const CommonOpts& opts) {
  const Scenario sc = loadScenario(opts);
  const Problem pb = buildProblem(sc);
  const WorkerPool pool(sc.workers);

  const FineSolution fine = solveFine(pb.grid, pb.k, pb.bc, pb.f, sc.fine_solver,
                                      sc.krylov, sc.unknown_cap);
  const DomainDecomposition dd = decompose(pb.grid, sc.nd);
  std::array<int, 3> hbar = sc.hbar;
  for (int a = 0; a < 3; ++a)
    if (hbar[a] <= 0) hbar[a] = dd.sub_cells[a];
  const InterfaceSpace space = buildInterfaceSpace(dd, hbar);
  const MultiscaleSolution msol =
      solveMrcm(dd, space, pb.k, pb.bc, pb.f, sc.alpha, pool);

  ErrorReport report;
  const bool gauge_free = !pb.bc.hasPressureClosure();
  report.pressure_error =
      pressureError(pb.grid, msol.pressure, fine.pressure, gauge_free);
  report.velocity_error = velocityError(pb.grid, msol.flux, fine.flux, pb.k);
  const SkeletonJumps jumps = skeletonJumps(dd, pb.k, msol);
  report.max_pressure_jump = jumps.max_pressure_jump;
  report.max_flux_jump = jumps.max_flux_jump;
  writeErrorCsv(opts.out_prefix + "_errors.csv", report);

  RunReport run;
  run.errors = report;
  run.timings = fine.timings;
  run.timings.merge(msol.timings);
  run.krylov_iterations = fine.krylov.iterations;
  const Eigen::VectorXd res =
      cellMassResidual(Subgrid::whole(pb.grid), fine.flux, pb.f);
  run.flags.emplace_back(
      "fine_flux_conservative",
      res.cwiseAbs().maxCoeff() <=
          1e-10 * residualScale(Subgrid::whole(pb.grid), fine.flux, pb.f));
  run.flags.emplace_back("pressure_gauge_free", gauge_free);
  writeRunReport(opts.out_prefix + "_report.txt", run, "compare");
  writeTimingsCsv(opts.out_prefix + "_timings.csv", run.timings, "compare");
  std::cout << "e_p = " << report.pressure_error
            << ", e_v = " << report.velocity_error
            << ", max dp = " << report.max_pressure_jump
            << ", max du = " << report.max_flux_jump << "\n";
  return 0;
}

int cmdTwoPhase(const CommonOpts& opts) {
  const Scenario sc = loadScenario(opts);
  const Problem pb = buildProblem(sc);
  if (pb.wells.injectors.empty())
    throw std::runtime_error("two-phase runs need wells (set five_spot = true)");
  const WorkerPool pool(sc.workers);
  const ImpesResult result = runImpes(pb.grid, pb.k, pb.bc, pb.wells, sc.fluid,
                                      sc.impes, darcyConfig(sc), pool);
  writeProductionCsv(opts.out_prefix + "_production.csv", result.record);
  writeTimingsCsv(opts.out_prefix + "_timings.csv", result.timings, "two-phase");
  dumpField(opts.out_prefix + "_saturation.mrcmfield", pb.grid.dims,
            result.saturation);
  dumpField(opts.out_prefix + "_pressure.mrcmfield", pb.grid.dims, result.pressure);
  std::cout << "two-phase: " << result.transport_steps << " transport steps, "
            << result.pressure_solves << " pressure solves, final T_PVI "
            << result.record.samples.back().t_pvi << ", oil fraction "
            << result.record.samples.back().oil_fraction << "\n";
  return 0;
}

int cmdBench(const CommonOpts& opts, bool local, bool sweep) {
  const WorkerPool pool(opts.workers);
  if (local) {
    const std::vector<LocalSolverSample> samples =
        benchLocalSolver({8, 12, 16, 22}, 13);
    CsvWriter csv(opts.out_prefix + "_local_solver.csv",
                  "cells,factor_seconds,per_rhs_seconds");
    std::cout << "local solver (13 rhs):\n";
    for (const LocalSolverSample& s : samples) {
      csv.row({std::to_string(s.cells), CsvWriter::format(s.factor_seconds),
               CsvWriter::format(s.per_rhs_seconds)});
      std::cout << "  n=" << s.cells << " factor " << s.factor_seconds
                << " s, per-rhs " << s.per_rhs_seconds << " s\n";
    }
  }
  if (sweep) {
    Scenario sc;
    if (!opts.config.empty()) sc = parseConfig(opts.config);
    else {
      sc.grid_dims = {32, 32, 16};
      sc.extents = {1200.0, 2200.0, 120.0};
      sc.perm.source = PermSpec::Source::Generate;
      sc.perm.contrast = 1e3;
    }
    const StructuredGrid grid = scenarioGrid(sc);
    const PermeabilityField k = buildPermeability(sc, grid);
    std::vector<std::array<int, 3>> nds;
    for (std::array<int, 3> nd : {std::array<int, 3>{2, 2, 1},
                                  std::array<int, 3>{2, 2, 2},
                                  std::array<int, 3>{4, 4, 2},
                                  std::array<int, 3>{8, 8, 4}}) {
      bool ok = true;
      for (int a = 0; a < 3; ++a)
        ok = ok && grid.dims[a] % nd[a] == 0 && grid.dims[a] / nd[a] >= 2;
      if (ok) nds.push_back(nd);
    }
    const std::vector<SweepSample> samples = benchSubdomainSweep(grid, k, nds, pool);
    CsvWriter csv(opts.out_prefix + "_sweep.csv",
                  "nd,interface_dofs,mbf_seconds,interface_seconds,reconstruct_seconds");
    std::cout << "subdomain sweep on " << grid.cellCount() << " cells:\n";
    for (const SweepSample& s : samples) {
      const std::string nd = std::to_string(s.nd[0]) + "x" +
                             std::to_string(s.nd[1]) + "x" +
                             std::to_string(s.nd[2]);
      csv.row({nd, std::to_string(s.interface_dofs),
               CsvWriter::format(s.mbf_seconds),
               CsvWriter::format(s.interface_seconds),
               CsvWriter::format(s.reconstruct_seconds)});
      std::cout << "  " << nd << ": mbfs " << s.mbf_seconds << " s, interface "
                << s.interface_seconds << " s (" << s.interface_dofs
                << " dofs)\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrcmflow: multiscale Robin-coupled Darcy and two-phase flow"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto addCommon = [&](CLI::App* cmd, bool config_required = true) {
    cmd->add_option("-c,--config", opts.config, "scenario config file")
        ->required(config_required);
    cmd->add_option("-o,--out", opts.out_prefix, "output file prefix");
    cmd->add_option("-w,--workers", opts.workers,
                    "worker threads (0 = available parallelism)");
  };

  addCommon(app.add_subcommand("gen-perm", "generate or import a permeability field"));
  addCommon(app.add_subcommand("solve-fine", "global fine-grid Darcy solve"));
  addCommon(app.add_subcommand("solve-mrcm", "multiscale Darcy solve"));
  addCommon(app.add_subcommand("compare", "fine vs MRCM error report"));
  addCommon(app.add_subcommand("two-phase", "IMPES two-phase simulation"));

  bool bench_local = false, bench_sweep = false;
  CLI::App* bench = app.add_subcommand("bench", "timing harness");
  addCommon(bench, false);
  bench->add_flag("--local-solver", bench_local, "factor vs per-rhs timings");
  bench->add_flag("--sweep-subdomains", bench_sweep, "per-stage MRCM sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (app.got_subcommand("gen-perm")) return cmdGenPerm(opts);
    if (app.got_subcommand("solve-fine")) return cmdSolveFine(opts);
    if (app.got_subcommand("solve-mrcm")) return cmdSolveMrcm(opts);
    if (app.got_subcommand("compare")) return cmdCompare(opts);
    if (app.got_subcommand("two-phase")) return cmdTwoPhase(opts);
    if (app.got_subcommand("bench")) {
      if (!bench_local && !bench_sweep) bench_local = bench_sweep = true;
      return cmdBench(opts, bench_local, bench_sweep);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
