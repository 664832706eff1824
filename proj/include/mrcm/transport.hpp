// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/engine.hpp"
#include "mrcm/postprocess.hpp"

#include <vector>

namespace mrcm {

struct FluidProps {
  double mu_w = 1.0;
  double mu_o = 1.0;
};

/// lambda(S) = S^2/mu_w + (1-S)^2/mu_o
double totalMobility(double s, const FluidProps& props);

/// phi(S) = M S^2 / (M S^2 + (1-S)^2), M = mu_o/mu_w
double fractionalFlow(double s, const FluidProps& props);

/// d phi / dS in closed form.
double fractionalFlowDerivative(double s, const FluidProps& props);

/// Componentwise K^ = lambda(S) K.
PermeabilityField mobilityScaled(const PermeabilityField& k, const CellField& s,
                                 const FluidProps& props);

/// Volumetric source boxes: rate > 0 injects, rate < 0 produces.
struct WellBox {
  Box box;
  double rate = 0.0;
};

struct Wells {
  std::vector<WellBox> injectors;
  std::vector<WellBox> producers;
};

/// Source cell field with f = rate/(box volume) in each well cell.
CellField wellSource(const StructuredGrid& grid, const Wells& wells);

/// CFL-limited saturation step:
/// dt = sigma * min(h) / max_cells |phi'(S_cell)| * max(adjacent |u|);
/// returns `dt_cap` when the field carries no flow.
double cflTimestep(const StructuredGrid& grid, const FaceFluxField& flux,
                   const CellField& s, const FluidProps& props, double sigma_cfl,
                   double dt_cap);

/// Explicit conservative upwind update with a divergence-compensation term
/// keyed to the discrete residual of the Darcy flux, plus pure-water
/// injection at source cells and upwind-composition extraction at sinks.
/// Throws when the update leaves [0,1] beyond roundoff (a CFL violation).
CellField advanceSaturation(const StructuredGrid& grid, const CellField& s,
                            const FaceFluxField& flux, const CellField& f,
                            double dt, const FluidProps& props,
                            const WorkerPool& pool);

/// Holds water saturation at 1 inside every injector box.
void applyInjectorSaturation(const StructuredGrid& grid, const Wells& wells,
                             CellField& s);

struct ProductionSample {
  double t_pvi = 0.0;
  double oil_fraction = 0.0;
  std::vector<double> watercut;
  bool zero_production = false;
};

struct ProductionRecord {
  std::vector<ProductionSample> samples;
};

/// Discrete well-boundary integrals with upwind fractional flow; fractions
/// are flagged zero when no producer carries flux.
ProductionSample productionMetrics(const StructuredGrid& grid,
                                   const FaceFluxField& flux, const CellField& s,
                                   const Wells& wells, const FluidProps& props);

enum class DarcyDriver { Fine, Mrcm };

struct DarcyConfig {
  DarcyDriver driver = DarcyDriver::Fine;
  std::array<int, 3> nd{1, 1, 1};
  std::array<int, 3> hbar_cells{0, 0, 0};  // 0 = subdomain size (Hbar = H)
  double alpha = 1.0;
  FineSolver fine_solver = FineSolver::Direct;
  KrylovConfig krylov;
  long unknown_cap = 2'000'000;
};

struct ImpesConfig {
  int skip = 600;  // pressure step every `skip` transport steps
  double sigma_cfl = 0.9;
  double t_end_pvi = 0.1;
  double dt_cap = 1e9;
  long max_steps = 50'000'000;
  // a failed Darcy solve dumps the current state under this prefix
  std::string abort_dump_prefix = "impes_abort";
};

struct ImpesResult {
  ProductionRecord record;
  CellField saturation;
  CellField pressure;
  FaceFluxField flux;
  StageTimings timings;
  long transport_steps = 0;
  int pressure_solves = 0;
};

/// IMPES loop: recompute mobility and the Darcy flux every `skip` transport
/// steps (MRCM fluxes pass through the conservative postprocessing first),
/// then advance saturation explicitly with the frozen flux. One production
/// sample is recorded per pressure solve plus one at the end time.
ImpesResult runImpes(const StructuredGrid& grid, const PermeabilityField& k,
                     const BoundarySpec& bc, const Wells& wells,
                     const FluidProps& props, const ImpesConfig& impes,
                     const DarcyConfig& darcy, const WorkerPool& pool);

}  // namespace mrcm
