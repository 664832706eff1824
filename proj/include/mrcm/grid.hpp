// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>

namespace mrcm {

/// Scalar cell data, one value per cell, x1-fastest ordering.
using CellField = Eigen::VectorXd;

/// Uniform hexahedral cell grid on a box [0,L1]x[0,L2]x[0,L3].
struct StructuredGrid {
  std::array<int, 3> dims{1, 1, 1};          // cells per axis
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<double, 3> h{1.0, 1.0, 1.0};    // cell sizes Li/ni

  int cellCount() const { return dims[0] * dims[1] * dims[2]; }

  int cellIndex(int i, int j, int k) const {
    return i + dims[0] * (j + dims[1] * k);
  }

  double cellVolume() const { return h[0] * h[1] * h[2]; }

  /// Area of a face perpendicular to `axis`.
  double faceArea(int axis) const {
    return h[(axis + 1) % 3] * h[(axis + 2) % 3];
  }

  /// Number of faces perpendicular to `axis`, boundary faces included.
  int faceCount(int axis) const {
    std::array<int, 3> d = dims;
    d[axis] += 1;
    return d[0] * d[1] * d[2];
  }

  double hMin() const { return std::min({h[0], h[1], h[2]}); }
  double hMax() const { return std::max({h[0], h[1], h[2]}); }
};

/// Axis-aligned cell box inside a grid (subdomain or well footprint).
struct Box {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> dims{0, 0, 0};

  int cellCount() const { return dims[0] * dims[1] * dims[2]; }

  int localIndex(int i, int j, int k) const {
    return i + dims[0] * (j + dims[1] * k);
  }

  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i < lo[0] + dims[0] && j >= lo[1] &&
           j < lo[1] + dims[1] && k >= lo[2] && k < lo[2] + dims[2];
  }

  bool overlaps(const Box& other) const {
    for (int a = 0; a < 3; ++a) {
      if (lo[a] + dims[a] <= other.lo[a] || other.lo[a] + other.dims[a] <= lo[a])
        return false;
    }
    return true;
  }
};

/// Oriented normal fluxes on all cell faces, one array per axis.
/// Values are fluxes along the positive axis direction; faces perpendicular
/// to x1 are indexed (i,j,k) with i in [0,n1], x1-fastest.
struct FaceFluxField {
  std::array<int, 3> dims{0, 0, 0};
  Eigen::VectorXd u1, u2, u3;

  FaceFluxField() = default;
  explicit FaceFluxField(const std::array<int, 3>& cell_dims) { resize(cell_dims); }

  void resize(const std::array<int, 3>& cell_dims) {
    dims = cell_dims;
    u1.setZero((dims[0] + 1) * dims[1] * dims[2]);
    u2.setZero(dims[0] * (dims[1] + 1) * dims[2]);
    u3.setZero(dims[0] * dims[1] * (dims[2] + 1));
  }

  Eigen::VectorXd& component(int axis) { return axis == 0 ? u1 : (axis == 1 ? u2 : u3); }
  const Eigen::VectorXd& component(int axis) const {
    return axis == 0 ? u1 : (axis == 1 ? u2 : u3);
  }

  /// Index of the face perpendicular to `axis`; `fi` runs along `axis`
  /// in [0, dims[axis]], the other two are cell coordinates.
  int faceIndex(int axis, int i, int j, int k) const {
    switch (axis) {
      case 0: return i + (dims[0] + 1) * (j + dims[1] * k);
      case 1: return i + dims[0] * (j + (dims[1] + 1) * k);
      default: return i + dims[0] * (j + dims[1] * k);
    }
  }

  double maxAbs() const {
    double m = 0.0;
    for (int a = 0; a < 3; ++a)
      if (component(a).size() > 0) m = std::max(m, component(a).cwiseAbs().maxCoeff());
    return m;
  }
};

/// Diagonal permeability tensor per cell, strictly positive components.
struct PermeabilityField {
  Eigen::ArrayXd k11, k22, k33;

  PermeabilityField() = default;
  explicit PermeabilityField(int cells) { k11.setZero(cells); k22.setZero(cells); k33.setZero(cells); }

  int cells() const { return static_cast<int>(k11.size()); }

  Eigen::ArrayXd& component(int axis) { return axis == 0 ? k11 : (axis == 1 ? k22 : k33); }
  const Eigen::ArrayXd& component(int axis) const {
    return axis == 0 ? k11 : (axis == 1 ? k22 : k33);
  }

  double minCoeff() const { return std::min({k11.minCoeff(), k22.minCoeff(), k33.minCoeff()}); }
  double maxCoeff() const { return std::max({k11.maxCoeff(), k22.maxCoeff(), k33.maxCoeff()}); }
};

/// Tangential axes of a face perpendicular to `axis`, in ascending order.
inline std::array<int, 2> tangentialAxes(int axis) {
  return axis == 0 ? std::array<int, 2>{1, 2}
         : axis == 1 ? std::array<int, 2>{0, 2}
                     : std::array<int, 2>{0, 1};
}

StructuredGrid makeGrid(const std::array<int, 3>& dims,
                        const std::array<double, 3>& extents);

/// Throws unless every component is finite and strictly positive.
void validatePermeability(const PermeabilityField& field);

}  // namespace mrcm
