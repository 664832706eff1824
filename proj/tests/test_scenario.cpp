// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/io.hpp"
#include "mrcm/scenario.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace mrcm;

TEST_CASE("minimal config applies the documented defaults") {
  const Scenario sc = parseConfigText("[grid]\ndims = 8,8,4\n", "test");
  CHECK(sc.grid_dims == std::array<int, 3>{8, 8, 4});
  CHECK(sc.alpha == 1.0);
  CHECK(sc.impes.skip == 600);
  CHECK(sc.impes.sigma_cfl == 0.9);
  CHECK(sc.perm.source == PermSpec::Source::Uniform);
  CHECK(sc.perm.value == 1.0);

  const StructuredGrid grid = scenarioGrid(sc);
  const PermeabilityField k = buildPermeability(sc, grid);
  CHECK(k.maxCoeff() == 1.0);
  CHECK(k.minCoeff() == 1.0);
}

TEST_CASE("config errors carry line numbers") {
  CHECK_THROWS_WITH_AS(
      parseConfigText("[grid]\ndims = 8,8,4\ndims = 2,2,2\n", "cfg"),
      doctest::Contains("cfg:3"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parseConfigText("[grid]\nbogus = 1\n", "cfg"),
                       doctest::Contains("unknown key"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parseConfigText("[nosuch]\nx = 1\n", "cfg"),
                       doctest::Contains("unknown section"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parseConfigText("dims = 1,1,1\n", "cfg"),
                       doctest::Contains("outside"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parseConfigText("[grid]\ndims = a,b,c\n", "cfg"),
                       doctest::Contains("bad value"), std::runtime_error);
}

TEST_CASE("invariant violations are collected") {
  const char* text =
      "[grid]\n"
      "dims = 9,8,4\n"
      "[mrcm]\n"
      "nd = 2,2,2\n"
      "alpha = -1\n";
  CHECK_THROWS_WITH_AS(parseConfigText(text, "cfg"), doctest::Contains("divide"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parseConfigText(text, "cfg"), doctest::Contains("alpha"),
                       std::runtime_error);
}

TEST_CASE("well boxes outside or overlapping the domain are rejected") {
  const char* text =
      "[grid]\n"
      "dims = 2,2,2\n"
      "[wells]\n"
      "five_spot = true\n";
  CHECK_THROWS_WITH_AS(parseConfigText(text, "cfg"), doctest::Contains("overlap"),
                       std::runtime_error);
}

TEST_CASE("five-spot construction") {
  const StructuredGrid grid = makeGrid({16, 16, 8}, {1200.0, 2200.0, 120.0});
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  CHECK(wells.injectors.size() == 1);
  CHECK(wells.producers.size() == 4);

  // 5 disjoint boxes inside the domain
  std::vector<Box> all{wells.injectors[0].box};
  for (const auto& w : wells.producers) all.push_back(w.box);
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i].lo[0] >= 0);
    CHECK(all[i].lo[0] + all[i].dims[0] <= 16);
    CHECK(all[i].dims[2] == 8);  // full column
    for (std::size_t j = i + 1; j < all.size(); ++j)
      CHECK_FALSE(all[i].overlaps(all[j]));
  }

  // balanced source: integral of f is zero
  const CellField f = wellSource(grid, wells);
  CHECK(std::abs(f.sum()) <= 1e-12 * f.cwiseAbs().maxCoeff());

  // rate normalization: 1 PVI per 1/pvi_rate time units
  const double vp = 1200.0 * 2200.0 * 120.0;
  CHECK(wells.injectors[0].rate == doctest::Approx(0.2 * vp));
}

TEST_CASE("five-spot on the reference grid uses the paper footprint") {
  const StructuredGrid grid = makeGrid({60, 220, 60}, {1200.0, 2200.0, 120.0});
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  CHECK(wells.injectors[0].box.dims == std::array<int, 3>{1, 1, 60});
}

TEST_CASE("production and timing CSV layouts") {
  ProductionRecord rec;
  rec.samples.push_back({0.0, 1.0, {0.0, 0.0, 0.0, 0.0}, false});
  rec.samples.push_back({0.05, 0.875, {0.25, 0.125, 0.0, 0.125}, false});
  writeProductionCsv("curves_test.csv", rec);
  {
    std::ifstream in("curves_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_pvi,oil_fraction,w1,w2,w3,w4");
    std::getline(in, line);
    CHECK(line == "0,1,0,0,0,0");
    std::getline(in, line);
    CHECK(line == "0.05,0.875,0.25,0.125,0,0.125");
  }
  std::remove("curves_test.csv");

  StageTimings t;
  t.add("mbfs", 0.5);
  t.add("interface_solve", 0.25);
  writeTimingsCsv("timings_test.csv", t, "case");
  {
    std::ifstream in("timings_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "stage,name,seconds");
    std::getline(in, line);
    CHECK(line == "mbfs,case,0.5");
  }
  std::remove("timings_test.csv");
}

TEST_CASE("scenario import also accepts MRCMFIELD dumps") {
  const StructuredGrid base = makeGrid({4, 4, 2}, {1, 1, 1});
  const PermeabilityField k = channelField(base, 5, 100.0);
  dumpPermeability("scenario_perm.mrcmfield", base.dims, k);
  const char* text =
      "[grid]\n"
      "dims = 4,4,2\n"
      "[perm]\n"
      "source = import\n"
      "file = scenario_perm.mrcmfield\n";
  const Scenario sc = parseConfigText(text, "cfg");
  const PermeabilityField back = buildPermeability(sc, scenarioGrid(sc));
  for (int m = 0; m < 3; ++m)
    CHECK((k.component(m) == back.component(m)).all());
  std::remove("scenario_perm.mrcmfield");
}

TEST_CASE("scenario permeability pipeline: import + theta + refine") {
  // write a small SPE10-style file, import through the scenario path with a
  // contrast exponent and refinement
  const StructuredGrid base = makeGrid({4, 4, 2}, {1, 1, 1});
  const PermeabilityField k = channelField(base, 3, 100.0);
  exportSpe10("scenario_perm.txt", k);

  const char* text =
      "[grid]\n"
      "dims = 8,8,2\n"
      "[perm]\n"
      "source = import\n"
      "file = scenario_perm.txt\n"
      "file_dims = 4,4,2\n"
      "theta = 0.5\n"
      "refine = 2,2,1\n";
  const Scenario sc = parseConfigText(text, "cfg");
  const StructuredGrid grid = scenarioGrid(sc);
  const PermeabilityField imported = buildPermeability(sc, grid);
  CHECK(imported.cells() == grid.cellCount());
  const double expected_contrast =
      std::sqrt(k.k11.maxCoeff() / k.k11.minCoeff());
  CHECK(imported.k11.maxCoeff() / imported.k11.minCoeff() ==
        doctest::Approx(expected_contrast).epsilon(1e-12));
  std::remove("scenario_perm.txt");
}
