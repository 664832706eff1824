// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/perm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

namespace mrcm {

namespace {

// splitmix64: tiny, portable, fully deterministic across platforms.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() {  // in [0,1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double gaussian() {  // Box-Muller, no stdlib distribution involved
    double u1 = uniform(), u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

// One pass of a 3-point box blur along each axis, reflecting at boundaries.
void blur3(Eigen::ArrayXd& v, const std::array<int, 3>& dims) {
  const int n1 = dims[0], n2 = dims[1], n3 = dims[2];
  Eigen::ArrayXd tmp(v.size());
  auto idx = [&](int i, int j, int k) { return i + n1 * (j + n2 * k); };
  for (int axis = 0; axis < 3; ++axis) {
    const int n = dims[axis];
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          int c[3] = {i, j, k};
          int lo[3] = {i, j, k}, hi[3] = {i, j, k};
          lo[axis] = std::max(0, c[axis] - 1);
          hi[axis] = std::min(n - 1, c[axis] + 1);
          tmp[idx(i, j, k)] = (v[idx(lo[0], lo[1], lo[2])] + v[idx(i, j, k)] +
                               v[idx(hi[0], hi[1], hi[2])]) / 3.0;
        }
    v.swap(tmp);
  }
}

}  // namespace

PermeabilityField uniformPermeability(const StructuredGrid& grid, double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("permeability value must be positive and finite");
  PermeabilityField f(grid.cellCount());
  f.k11.setConstant(value);
  f.k22.setConstant(value);
  f.k33.setConstant(value);
  return f;
}

PermeabilityField channelField(const StructuredGrid& grid, std::uint64_t seed,
                               double contrast, double sigma) {
  if (!(contrast >= 1.0) || !std::isfinite(contrast))
    throw std::invalid_argument("channel field contrast must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("channel field sigma must be >= 0");
  const int n1 = grid.dims[0], n2 = grid.dims[1], n3 = grid.dims[2];
  const int cells = grid.cellCount();
  SplitMix64 rng(seed);

  // Sinuous channel mask shared by all components: paths wander along x2.
  Eigen::ArrayXd mask = Eigen::ArrayXd::Zero(cells);
  const int n_channels = 3;
  for (int c = 0; c < n_channels; ++c) {
    const double center = (0.15 + 0.7 * rng.uniform()) * n1;
    const double amp = (0.05 + 0.15 * rng.uniform()) * n1;
    const double freq = 1.0 + 1.5 * rng.uniform();
    const double phase = 2.0 * M_PI * rng.uniform();
    const double width = std::max(0.6, (0.03 + 0.05 * rng.uniform()) * n1);
    const int z_lo = static_cast<int>(rng.uniform() * 0.4 * n3);
    const int z_hi = n3 - static_cast<int>(rng.uniform() * 0.4 * n3);
    for (int k = z_lo; k < z_hi; ++k)
      for (int j = 0; j < n2; ++j) {
        const double path =
            center + amp * std::sin(2.0 * M_PI * freq * (j + 0.5) / n2 + phase);
        for (int i = 0; i < n1; ++i)
          if (std::abs(i + 0.5 - path) <= width)
            mask[grid.cellIndex(i, j, k)] = 1.0;
      }
  }

  PermeabilityField out(cells);
  for (int m = 0; m < 3; ++m) {
    Eigen::ArrayXd noise(cells);
    for (int c = 0; c < cells; ++c) noise[c] = rng.gaussian();
    blur3(noise, grid.dims);
    blur3(noise, grid.dims);
    // log K is an affine map of sigma * (smoothed Gaussian) + channel boost,
    // normalized so each component spans [1, contrast] exactly.
    Eigen::ArrayXd raw = sigma * noise + mask;
    const double lo = raw.minCoeff(), hi = raw.maxCoeff();
    Eigen::ArrayXd t = (hi > lo) ? ((raw - lo) / (hi - lo)).eval()
                                 : Eigen::ArrayXd::Zero(cells).eval();
    out.component(m) = Eigen::exp(t * std::log(contrast));
  }
  validatePermeability(out);
  return out;
}

PermeabilityField importSpe10(const std::string& path,
                              const std::array<int, 3>& file_dims,
                              int layer_lo, int layer_count) {
  const int n1 = file_dims[0], n2 = file_dims[1], n3 = file_dims[2];
  if (n1 < 1 || n2 < 1 || n3 < 1)
    throw std::invalid_argument("import dims must be positive");
  if (layer_count < 0) layer_count = n3 - layer_lo;
  if (layer_lo < 0 || layer_count < 1 || layer_lo + layer_count > n3)
    throw std::invalid_argument("layer range [" + std::to_string(layer_lo) + "," +
                                std::to_string(layer_lo + layer_count) +
                                ") outside file layers [0," + std::to_string(n3) + ")");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open permeability file: " + path);

  const std::size_t n = static_cast<std::size_t>(n1) * n2 * n3;
  std::vector<double> values;
  values.reserve(3 * n);
  std::string token;
  while (in >> token) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw std::runtime_error("unparsable token '" + token + "' at position " +
                               std::to_string(values.size()) + " in " + path);
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::runtime_error("non-positive permeability value at position " +
                               std::to_string(values.size()) + " in " + path);
    values.push_back(v);
  }
  if (values.size() != 3 * n)
    throw std::runtime_error("expected " + std::to_string(3 * n) + " values in " +
                             path + ", found " + std::to_string(values.size()));

  PermeabilityField out(n1 * n2 * layer_count);
  for (int m = 0; m < 3; ++m) {
    const std::size_t block = m * n;
    Eigen::ArrayXd& comp = out.component(m);
    int dst = 0;
    for (int k = layer_lo; k < layer_lo + layer_count; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i)
          comp[dst++] = values[block + i + std::size_t(n1) * (j + std::size_t(n2) * k)];
  }
  return out;
}

void exportSpe10(const std::string& path, const PermeabilityField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[32];
  for (int m = 0; m < 3; ++m) {
    const Eigen::ArrayXd& comp = field.component(m);
    for (Eigen::Index c = 0; c < comp.size(); ++c) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), comp[c]);
      if (ec != std::errc{}) throw std::runtime_error("value formatting failed");
      out.write(buf, ptr - buf);
      out.put((c + 1) % 6 == 0 ? '\n' : ' ');
    }
    out.put('\n');
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PermeabilityField refineField(const PermeabilityField& field,
                              const std::array<int, 3>& coarse_dims,
                              const std::array<int, 3>& factors) {
  for (int a = 0; a < 3; ++a)
    if (factors[a] < 1)
      throw std::invalid_argument("refinement factor must be >= 1");
  if (field.cells() != coarse_dims[0] * coarse_dims[1] * coarse_dims[2])
    throw std::invalid_argument("field size does not match coarse dims");
  const int f1 = factors[0], f2 = factors[1], f3 = factors[2];
  const int m1 = coarse_dims[0] * f1, m2 = coarse_dims[1] * f2, m3 = coarse_dims[2] * f3;
  PermeabilityField out(m1 * m2 * m3);
  for (int m = 0; m < 3; ++m) {
    const Eigen::ArrayXd& src = field.component(m);
    Eigen::ArrayXd& dst = out.component(m);
    for (int k = 0; k < m3; ++k)
      for (int j = 0; j < m2; ++j)
        for (int i = 0; i < m1; ++i)
          dst[i + m1 * (j + m2 * k)] =
              src[(i / f1) + coarse_dims[0] * ((j / f2) + coarse_dims[1] * (k / f3))];
  }
  return out;
}

PermeabilityField applyContrastExponent(const PermeabilityField& field,
                                        double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("contrast exponent must be >= 0");
  PermeabilityField out(field.cells());
  for (int m = 0; m < 3; ++m)
    out.component(m) = Eigen::pow(field.component(m), theta);
  validatePermeability(out);
  return out;
}

}  // namespace mrcm
