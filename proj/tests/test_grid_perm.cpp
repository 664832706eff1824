// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/grid.hpp"
#include "mrcm/io.hpp"
#include "mrcm/perm.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace mrcm;

TEST_CASE("grid construction and cell sizes") {
  const StructuredGrid g = makeGrid({60, 220, 60}, {1200.0, 2200.0, 120.0});
  CHECK(g.h[0] == doctest::Approx(20.0));
  CHECK(g.h[1] == doctest::Approx(10.0));
  CHECK(g.h[2] == doctest::Approx(2.0));
  CHECK(g.cellCount() == 60 * 220 * 60);

  const StructuredGrid unit = makeGrid({1, 1, 1}, {1.0, 1.0, 1.0});
  CHECK(unit.h == std::array<double, 3>{1.0, 1.0, 1.0});

  const StructuredGrid two = makeGrid({2, 1, 1}, {2.0, 1.0, 1.0});
  CHECK(two.h == std::array<double, 3>{1.0, 1.0, 1.0});
  CHECK(two.cellCount() == 2);

  CHECK_THROWS_AS(makeGrid({0, 1, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(makeGrid({1, 1, 1}, {1, -1, 1}), std::invalid_argument);
}

TEST_CASE("x1-fastest cell ordering") {
  const StructuredGrid g = makeGrid({3, 4, 5}, {1, 1, 1});
  CHECK(g.cellIndex(0, 0, 0) == 0);
  CHECK(g.cellIndex(1, 0, 0) == 1);
  CHECK(g.cellIndex(0, 1, 0) == 3);
  CHECK(g.cellIndex(0, 0, 1) == 12);
  CHECK(g.cellIndex(2, 3, 4) == g.cellCount() - 1);
}

TEST_CASE("channel field determinism and exact contrast") {
  const StructuredGrid g = makeGrid({20, 24, 6}, {1, 1, 1});

  const PermeabilityField a = channelField(g, 7, 1e4);
  const PermeabilityField b = channelField(g, 7, 1e4);
  for (int m = 0; m < 3; ++m)
    CHECK((a.component(m) == b.component(m)).all());

  const double ratio = a.maxCoeff() / a.minCoeff();
  CHECK(ratio >= 5e3);
  CHECK(ratio <= 2e4);

  const PermeabilityField flat = channelField(g, 3, 1.0);
  CHECK(flat.maxCoeff() == doctest::Approx(flat.minCoeff()));
  CHECK(flat.k11.maxCoeff() == doctest::Approx(flat.k33.maxCoeff()));

  const PermeabilityField c = channelField(g, 8, 1e4);
  CHECK((a.k11 != c.k11).any());  // distinct seeds differ

  CHECK_THROWS_AS(channelField(g, 1, 0.5), std::invalid_argument);
}

TEST_CASE("spe10 import: minimal file, block order, errors") {
  const char* path = "spe10_test_input.txt";
  {
    std::ofstream out(path);
    out << "1 2 3\n4 5 6";
  }
  const PermeabilityField f = importSpe10(path, {2, 1, 1});
  CHECK(f.k11[0] == 1.0);
  CHECK(f.k11[1] == 2.0);
  CHECK(f.k22[0] == 3.0);
  CHECK(f.k22[1] == 4.0);
  CHECK(f.k33[0] == 5.0);
  CHECK(f.k33[1] == 6.0);

  {
    std::ofstream out(path);
    out << "1 2 3 4 5";  // 3N-1 values
  }
  CHECK_THROWS_WITH_AS(importSpe10(path, {2, 1, 1}), doctest::Contains("expected 6"),
                       std::runtime_error);

  {
    std::ofstream out(path);
    out << "1 2 3 0.0 5 6";
  }
  CHECK_THROWS_WITH_AS(importSpe10(path, {2, 1, 1}),
                       doctest::Contains("non-positive"), std::runtime_error);

  {
    std::ofstream out(path);
    out << "1 2 x 4 5 6";
  }
  CHECK_THROWS_WITH_AS(importSpe10(path, {2, 1, 1}), doctest::Contains("unparsable"),
                       std::runtime_error);
  std::remove(path);
}

TEST_CASE("spe10 layer selection is zero-based") {
  const char* path = "spe10_layers_input.txt";
  {
    std::ofstream out(path);
    // dims (1,1,3): K11 = 10,20,30; K22 = 1,2,3; K33 = 4,5,6
    out << "10 20 30  1 2 3  4 5 6";
  }
  const PermeabilityField f = importSpe10(path, {1, 1, 3}, 1, 2);
  CHECK(f.cells() == 2);
  CHECK(f.k11[0] == 20.0);
  CHECK(f.k11[1] == 30.0);
  CHECK(f.k33[0] == 5.0);
  CHECK_THROWS_AS(importSpe10(path, {1, 1, 3}, 2, 2), std::invalid_argument);
  std::remove(path);
}

TEST_CASE("spe10 import/export round-trip is value-exact") {
  const StructuredGrid g = makeGrid({5, 4, 3}, {1, 1, 1});
  const PermeabilityField f = channelField(g, 11, 1e5);
  const char* path = "spe10_roundtrip.txt";
  exportSpe10(path, f);
  const PermeabilityField back = importSpe10(path, g.dims);
  for (int m = 0; m < 3; ++m)
    CHECK((f.component(m) == back.component(m)).all());
  std::remove(path);
}

TEST_CASE("refinement replicates values and preserves means") {
  const StructuredGrid g = makeGrid({3, 2, 2}, {1, 1, 1});
  const PermeabilityField f = channelField(g, 5, 100.0);

  const PermeabilityField same = refineField(f, g.dims, {1, 1, 1});
  CHECK((f.k11 == same.k11).all());

  PermeabilityField one(1);
  one.k11.setConstant(5.0);
  one.k22.setConstant(5.0);
  one.k33.setConstant(5.0);
  const PermeabilityField two = refineField(one, {1, 1, 1}, {2, 1, 1});
  CHECK(two.cells() == 2);
  CHECK(two.k11[0] == 5.0);
  CHECK(two.k11[1] == 5.0);

  const PermeabilityField fine = refineField(f, g.dims, {2, 3, 2});
  for (int m = 0; m < 3; ++m)
    CHECK(fine.component(m).mean() ==
          doctest::Approx(f.component(m).mean()).epsilon(1e-13));

  CHECK_THROWS_AS(refineField(f, g.dims, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("contrast exponent") {
  const StructuredGrid g = makeGrid({8, 8, 4}, {1, 1, 1});
  const PermeabilityField f = channelField(g, 2, 1e8);

  const PermeabilityField same = applyContrastExponent(f, 1.0);
  CHECK((f.k11 == same.k11).all());

  const PermeabilityField ones = applyContrastExponent(f, 0.0);
  CHECK(ones.k11.minCoeff() == 1.0);
  CHECK(ones.k33.maxCoeff() == 1.0);

  PermeabilityField single(1);
  single.k11.setConstant(1e8);
  single.k22.setConstant(1e8);
  single.k33.setConstant(1e8);
  CHECK(applyContrastExponent(single, 0.5).k11[0] == doctest::Approx(1e4));

  // contrast maps c -> c^theta
  const double theta = 0.37;
  const PermeabilityField pow = applyContrastExponent(f, theta);
  const double c = f.k11.maxCoeff() / f.k11.minCoeff();
  const double cpow = pow.k11.maxCoeff() / pow.k11.minCoeff();
  CHECK(cpow == doctest::Approx(std::pow(c, theta)).epsilon(1e-12));

  CHECK_THROWS_AS(applyContrastExponent(f, -0.1), std::invalid_argument);
}

TEST_CASE("MRCMFIELD dump round-trips bitwise") {
  const StructuredGrid g = makeGrid({4, 3, 2}, {1, 1, 1});
  Eigen::VectorXd data(g.cellCount());
  for (int i = 0; i < data.size(); ++i) data[i] = std::sin(i * 0.7) * 1e-3;
  const char* path = "field_roundtrip.mrcmfield";
  dumpField(path, g.dims, data);
  const CellField back = loadCellField(path, g.dims);
  CHECK((back.array() == data.array()).all());

  const PermeabilityField k = channelField(g, 9, 1e4);
  dumpPermeability(path, g.dims, k);
  const PermeabilityField kback = loadPermeability(path, g.dims);
  for (int m = 0; m < 3; ++m)
    CHECK((k.component(m) == kback.component(m)).all());
  std::remove(path);
}
