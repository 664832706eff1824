// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/metrics.hpp"
#include "mrcm/perm.hpp"
#include "mrcm/transport.hpp"

#include <string>

namespace mrcm {

struct PermSpec {
  enum class Source { Uniform, Generate, Import };
  Source source = Source::Uniform;
  double value = 1.0;          // uniform
  std::uint64_t seed = 1;      // generate
  double contrast = 1e3;       // generate
  double sigma = 0.6;          // generate: lognormal background weight
  std::string file;            // import (SPE10 ASCII or MRCMFIELD dump)
  std::array<int, 3> file_dims{0, 0, 0};
  int layer_lo = 0;            // zero-based x3 layer range
  int layer_count = -1;
  double theta = 1.0;          // contrast exponent
  std::array<int, 3> refine{1, 1, 1};
};

struct BcSpec {
  enum class Kind { NoFlow, PressureX1 };
  Kind kind = Kind::NoFlow;
  double p_lo = 1.0, p_hi = 0.0;
};

struct Scenario {
  std::array<int, 3> grid_dims{1, 1, 1};
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  PermSpec perm;
  BcSpec bc;

  bool five_spot = false;
  double pvi_rate = 0.2;  // pore volumes injected per unit time
  std::array<double, 4> producer_split{0.25, 0.25, 0.25, 0.25};

  FluidProps fluid{1.0, 3.0};

  std::array<int, 3> nd{1, 1, 1};
  std::array<int, 3> hbar{0, 0, 0};  // cells; 0 means Hbar = H
  double alpha = 1.0;

  ImpesConfig impes;
  DarcyDriver driver = DarcyDriver::Fine;
  FineSolver fine_solver = FineSolver::Direct;
  KrylovConfig krylov;
  long unknown_cap = 2'000'000;
  int workers = 0;  // 0 = available parallelism
};

/// Strict `[section]` + `key = value` parser: unknown or duplicate keys and
/// invariant violations are reported with line numbers.
Scenario parseConfig(const std::string& path);
Scenario parseConfigText(const std::string& text, const std::string& origin);

StructuredGrid scenarioGrid(const Scenario& sc);
PermeabilityField buildPermeability(const Scenario& sc, const StructuredGrid& grid);
BoundarySpec buildBc(const Scenario& sc, const StructuredGrid& grid);
DarcyConfig darcyConfig(const Scenario& sc);

/// Central injector column and four corner producer columns, footprints
/// scaled from the 5-spot reference layout; rates balance to zero net.
Wells buildFiveSpot(const StructuredGrid& grid, double pvi_rate,
                    const std::array<double, 4>& producer_split);

/// Aggregated outcome of one solver run: stage timings, error metrics,
/// iteration counts and pass/fail flags, mirrored as CSV plus a readable
/// summary.
struct RunReport {
  StageTimings timings;
  ErrorReport errors;
  int krylov_iterations = 0;
  std::vector<std::pair<std::string, bool>> flags;
};

void writeRunReport(const std::string& path, const RunReport& report,
                    const std::string& name);

void writeProductionCsv(const std::string& path, const ProductionRecord& record);
void writeTimingsCsv(const std::string& path, const StageTimings& timings,
                     const std::string& name);
void writeErrorCsv(const std::string& path, const ErrorReport& report);

/// Local direct-solver cost probe: factor once, then time the per-RHS
/// back-substitution on an n^3 Laplacian box.
struct LocalSolverSample {
  int cells = 0;
  double factor_seconds = 0.0;
  double per_rhs_seconds = 0.0;
};
std::vector<LocalSolverSample> benchLocalSolver(const std::vector<int>& box_sizes,
                                                int nrhs);

/// Per-stage MRCM timings over a subdomain-count sweep at fixed grid size.
struct SweepSample {
  std::array<int, 3> nd{1, 1, 1};
  int interface_dofs = 0;
  double mbf_seconds = 0.0;
  double interface_seconds = 0.0;  // assembly + solve
  double reconstruct_seconds = 0.0;
};
std::vector<SweepSample> benchSubdomainSweep(
    const StructuredGrid& grid, const PermeabilityField& k,
    const std::vector<std::array<int, 3>>& nds, const WorkerPool& pool);

}  // namespace mrcm
