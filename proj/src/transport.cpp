// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/transport.hpp"

#include "mrcm/io.hpp"

#include <atomic>
#include <cmath>

namespace mrcm {

namespace {

void checkSaturation(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("saturation outside [0,1]: " + std::to_string(s));
}

void checkProps(const FluidProps& props) {
  if (!(props.mu_w > 0.0) || !(props.mu_o > 0.0))
    throw std::invalid_argument("viscosities must be positive");
}

}  // namespace

double totalMobility(double s, const FluidProps& props) {
  checkSaturation(s);
  checkProps(props);
  return s * s / props.mu_w + (1.0 - s) * (1.0 - s) / props.mu_o;
}

double fractionalFlow(double s, const FluidProps& props) {
  checkSaturation(s);
  checkProps(props);
  const double m = props.mu_o / props.mu_w;
  const double num = m * s * s;
  return num / (num + (1.0 - s) * (1.0 - s));
}

double fractionalFlowDerivative(double s, const FluidProps& props) {
  checkSaturation(s);
  checkProps(props);
  const double m = props.mu_o / props.mu_w;
  const double d = m * s * s + (1.0 - s) * (1.0 - s);
  return 2.0 * m * s * (1.0 - s) / (d * d);
}

PermeabilityField mobilityScaled(const PermeabilityField& k, const CellField& s,
                                 const FluidProps& props) {
  if (s.size() != k.cells())
    throw std::invalid_argument("saturation/permeability size mismatch");
  Eigen::ArrayXd lambda(s.size());
  for (Eigen::Index c = 0; c < s.size(); ++c)
    lambda[c] = totalMobility(s[c], props);
  PermeabilityField out(k.cells());
  for (int m = 0; m < 3; ++m) out.component(m) = k.component(m) * lambda;
  return out;
}

CellField wellSource(const StructuredGrid& grid, const Wells& wells) {
  CellField f = CellField::Zero(grid.cellCount());
  auto add = [&](const WellBox& w) {
    const double per_cell = w.rate / (w.box.cellCount() * grid.cellVolume());
    for (int k = 0; k < w.box.dims[2]; ++k)
      for (int j = 0; j < w.box.dims[1]; ++j)
        for (int i = 0; i < w.box.dims[0]; ++i)
          f[grid.cellIndex(w.box.lo[0] + i, w.box.lo[1] + j, w.box.lo[2] + k)] +=
              per_cell;
  };
  for (const WellBox& w : wells.injectors) add(w);
  for (const WellBox& w : wells.producers) add(w);
  return f;
}

double cflTimestep(const StructuredGrid& grid, const FaceFluxField& flux,
                   const CellField& s, const FluidProps& props, double sigma_cfl,
                   double dt_cap) {
  if (!(sigma_cfl > 0.0 && sigma_cfl <= 1.0))
    throw std::invalid_argument("CFL safety factor must lie in (0,1]");
  const auto& d = grid.dims;
  double worst = 0.0;
  std::array<int, 3> c;
  for (c[2] = 0; c[2] < d[2]; ++c[2])
    for (c[1] = 0; c[1] < d[1]; ++c[1])
      for (c[0] = 0; c[0] < d[0]; ++c[0]) {
        const int cell = grid.cellIndex(c[0], c[1], c[2]);
        double umax = 0.0;
        // steepest local flux-function slope: phi' at the cell itself, or
        // the secant slope toward a neighbor where the data jumps (the
        // pointwise derivative vanishes at S in {0,1} and would let a sharp
        // front outrun the step)
        double slope = std::abs(fractionalFlowDerivative(s[cell], props));
        for (int a = 0; a < 3; ++a) {
          std::array<int, 3> hi = c;
          hi[a] += 1;
          umax = std::max({umax,
                           std::abs(flux.component(a)[flux.faceIndex(a, c[0], c[1], c[2])]),
                           std::abs(flux.component(a)[flux.faceIndex(a, hi[0], hi[1], hi[2])])});
          for (int step = -1; step <= 1; step += 2) {
            std::array<int, 3> nb = c;
            nb[a] += step;
            if (nb[a] < 0 || nb[a] >= d[a]) continue;
            const double s_nb = s[grid.cellIndex(nb[0], nb[1], nb[2])];
            if (std::abs(s_nb - s[cell]) > 1e-12)
              slope = std::max(slope,
                               std::abs(fractionalFlow(s_nb, props) -
                                        fractionalFlow(s[cell], props)) /
                                   std::abs(s_nb - s[cell]));
          }
        }
        worst = std::max(worst, slope * umax);
      }
  if (worst == 0.0) return dt_cap;
  return std::min(dt_cap, sigma_cfl * grid.hMin() / worst);
}

CellField advanceSaturation(const StructuredGrid& grid, const CellField& s,
                            const FaceFluxField& flux, const CellField& f,
                            double dt, const FluidProps& props,
                            const WorkerPool& pool) {
  const auto& d = grid.dims;
  if (s.size() != grid.cellCount())
    throw std::invalid_argument("saturation size mismatch");
  if (flux.dims != d) throw std::invalid_argument("flux dims mismatch");

  Eigen::ArrayXd phi(s.size());
  for (Eigen::Index c = 0; c < s.size(); ++c) phi[c] = fractionalFlow(s[c], props);

  CellField out(s.size());
  const double bound_tol = 1e-9;
  std::atomic<int> violation{-1};

  // Gather update over z-slabs: every cell reads the frozen state only.
  pool.parallelFor(d[2], [&](int k) {
    std::array<int, 3> c;
    c[2] = k;
    for (c[1] = 0; c[1] < d[1]; ++c[1])
      for (c[0] = 0; c[0] < d[0]; ++c[0]) {
        const int cell = grid.cellIndex(c[0], c[1], c[2]);
        double div_g = 0.0;  // upwind water flux divergence
        double div_u = 0.0;  // total flux divergence
        for (int a = 0; a < 3; ++a) {
          std::array<int, 3> hi = c;
          hi[a] += 1;
          const double u_lo =
              flux.component(a)[flux.faceIndex(a, c[0], c[1], c[2])];
          const double u_hi =
              flux.component(a)[flux.faceIndex(a, hi[0], hi[1], hi[2])];
          // upwind fractional flow; ties and boundary faces take the cell's own
          std::array<int, 3> nb_lo = c, nb_hi = c;
          nb_lo[a] -= 1;
          nb_hi[a] += 1;
          const double phi_lo =
              (u_lo > 0.0 && c[a] > 0)
                  ? phi[grid.cellIndex(nb_lo[0], nb_lo[1], nb_lo[2])]
                  : phi[cell];
          const double phi_hi =
              (u_hi >= 0.0 || c[a] + 1 >= d[a])
                  ? phi[cell]
                  : phi[grid.cellIndex(nb_hi[0], nb_hi[1], nb_hi[2])];
          div_g += (phi_hi * u_hi - phi_lo * u_lo) / grid.h[a];
          div_u += (u_hi - u_lo) / grid.h[a];
        }
        const double fc = f.size() ? f[cell] : 0.0;
        const double f_in = std::max(fc, 0.0);
        // conservative upwind transport with the compensation of the
        // numerical divergence, pure-water injection and upwind-cell
        // extraction folded in: the sink f^- phi and the compensation
        // -phi (div u - f) combine into + phi div_u
        double v = s[cell] - dt * div_g + dt * phi[cell] * div_u +
                   dt * f_in * (1.0 - phi[cell]);
        if (v < -bound_tol || v > 1.0 + bound_tol) {
          int expected = -1;
          violation.compare_exchange_strong(expected, cell);
          v = std::clamp(v, 0.0, 1.0);
        }
        out[cell] = std::clamp(v, 0.0, 1.0);
      }
  });
  if (violation.load() >= 0)
    throw std::runtime_error("saturation left [0,1] in cell " +
                             std::to_string(violation.load()) +
                             ": time step violates the CFL bound");
  return out;
}

void applyInjectorSaturation(const StructuredGrid& grid, const Wells& wells,
                             CellField& s) {
  for (const WellBox& w : wells.injectors)
    for (int k = 0; k < w.box.dims[2]; ++k)
      for (int j = 0; j < w.box.dims[1]; ++j)
        for (int i = 0; i < w.box.dims[0]; ++i)
          s[grid.cellIndex(w.box.lo[0] + i, w.box.lo[1] + j, w.box.lo[2] + k)] = 1.0;
}

ProductionSample productionMetrics(const StructuredGrid& grid,
                                   const FaceFluxField& flux, const CellField& s,
                                   const Wells& wells, const FluidProps& props) {
  ProductionSample sample;
  double total = 0.0, total_water = 0.0;
  for (const WellBox& w : wells.producers) {
    double net = 0.0, water = 0.0;
    const Box& b = w.box;
    std::array<int, 3> c;
    for (c[2] = b.lo[2]; c[2] < b.lo[2] + b.dims[2]; ++c[2])
      for (c[1] = b.lo[1]; c[1] < b.lo[1] + b.dims[1]; ++c[1])
        for (c[0] = b.lo[0]; c[0] < b.lo[0] + b.dims[0]; ++c[0])
          for (int a = 0; a < 3; ++a)
            for (int high = 0; high < 2; ++high) {
              std::array<int, 3> nb = c;
              nb[a] += high ? 1 : -1;
              if (b.contains(nb[0], nb[1], nb[2])) continue;  // interior face
              std::array<int, 3> fc = c;
              fc[a] += high;
              const double u =
                  flux.component(a)[flux.faceIndex(a, fc[0], fc[1], fc[2])];
              const double out = (high ? 1.0 : -1.0) * u;  // outward from the box
              const bool nb_inside = nb[a] >= 0 && nb[a] < grid.dims[a];
              const double phi_up =
                  (out >= 0.0 || !nb_inside)
                      ? fractionalFlow(s[grid.cellIndex(c[0], c[1], c[2])], props)
                      : fractionalFlow(s[grid.cellIndex(nb[0], nb[1], nb[2])], props);
              net += out * grid.faceArea(a);
              water += phi_up * out * grid.faceArea(a);
            }
    // producers draw inward flow, so `net` is negative at a working well;
    // clamp the roundoff spill around 0 and 1 (adding 0 drops negative zero)
    sample.watercut.push_back(
        net != 0.0 ? std::clamp(water / net, 0.0, 1.0) + 0.0 : 0.0);
    total += net;
    total_water += water;
  }
  if (total == 0.0) {
    sample.zero_production = true;
    sample.oil_fraction = 0.0;
    for (double& w : sample.watercut) w = 0.0;
  } else {
    sample.oil_fraction = std::clamp(1.0 - total_water / total, 0.0, 1.0);
  }
  return sample;
}

ImpesResult runImpes(const StructuredGrid& grid, const PermeabilityField& k,
                     const BoundarySpec& bc, const Wells& wells,
                     const FluidProps& props, const ImpesConfig& impes,
                     const DarcyConfig& darcy, const WorkerPool& pool) {
  if (impes.skip < 1) throw std::invalid_argument("skipping constant must be >= 1");
  if (!(impes.t_end_pvi >= 0.0)) throw std::invalid_argument("end time must be >= 0");

  ImpesResult res;
  const CellField f = wellSource(grid, wells);
  const double pore_volume = grid.extents[0] * grid.extents[1] * grid.extents[2];
  double injection_rate = 0.0;
  for (const WellBox& w : wells.injectors) injection_rate += w.rate;
  if (injection_rate <= 0.0 && impes.t_end_pvi > 0.0)
    throw std::runtime_error("no injection: the end time in PVI is unreachable");

  DomainDecomposition dd;
  InterfaceSpace space;
  if (darcy.driver == DarcyDriver::Mrcm) {
    dd = decompose(grid, darcy.nd);
    std::array<int, 3> hbar = darcy.hbar_cells;
    for (int a = 0; a < 3; ++a)
      if (hbar[a] <= 0) hbar[a] = dd.sub_cells[a];
    space = buildInterfaceSpace(dd, hbar);
  }

  res.saturation = CellField::Zero(grid.cellCount());
  applyInjectorSaturation(grid, wells, res.saturation);

  double t_pvi = 0.0;
  long n_s = 0;
  StopWatch watch;
  auto darcySolve = [&]() {
    const PermeabilityField khat = mobilityScaled(k, res.saturation, props);
    if (darcy.driver == DarcyDriver::Fine) {
      FineSolution fine = solveFine(grid, khat, bc, f, darcy.fine_solver,
                                    darcy.krylov, darcy.unknown_cap);
      res.pressure = std::move(fine.pressure);
      res.flux = std::move(fine.flux);
      res.timings.merge(fine.timings);
    } else {
      MultiscaleSolution msol = solveMrcm(dd, space, khat, bc, f, darcy.alpha, pool);
      watch.restart();
      ConservativeFlux cons =
          conservativeReconstruction(dd, khat, f, msol, pool);
      msol.timings.add("postprocess", watch.seconds());
      res.pressure = std::move(msol.pressure);
      res.flux = std::move(cons.flux);
      res.timings.merge(msol.timings);
    }
    res.pressure_solves += 1;
  };

  while (true) {
    if (n_s % impes.skip == 0) {
      try {
        darcySolve();
      } catch (const std::exception& e) {
        dumpField(impes.abort_dump_prefix + "_saturation.mrcmfield", grid.dims,
                  res.saturation);
        if (res.pressure.size() == grid.cellCount())
          dumpField(impes.abort_dump_prefix + "_pressure.mrcmfield", grid.dims,
                    res.pressure);
        throw std::runtime_error(
            std::string("Darcy solve failed at pressure step ") +
            std::to_string(res.pressure_solves) + " (state dumped under '" +
            impes.abort_dump_prefix + "_*'): " + e.what());
      }
      ProductionSample sample =
          productionMetrics(grid, res.flux, res.saturation, wells, props);
      sample.t_pvi = t_pvi;
      res.record.samples.push_back(std::move(sample));
    }
    if (t_pvi >= impes.t_end_pvi) break;
    double dt = cflTimestep(grid, res.flux, res.saturation, props,
                            impes.sigma_cfl, impes.dt_cap);
    const double remaining = (impes.t_end_pvi - t_pvi) * pore_volume / injection_rate;
    dt = std::min(dt, remaining);
    res.saturation =
        advanceSaturation(grid, res.saturation, res.flux, f, dt, props, pool);
    applyInjectorSaturation(grid, wells, res.saturation);
    t_pvi += dt * injection_rate / pore_volume;
    n_s += 1;
    if (n_s > impes.max_steps)
      throw std::runtime_error("IMPES exceeded the transport step limit");
  }

  ProductionSample last =
      productionMetrics(grid, res.flux, res.saturation, wells, props);
  last.t_pvi = t_pvi;
  res.record.samples.push_back(std::move(last));
  res.transport_steps = n_s;
  return res;
}

}  // namespace mrcm
