// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/grid.hpp"

#include <string>
#include <vector>

namespace mrcm {

/// Payload of an `MRCMFIELD v1` file: header dims plus raw f64 data,
/// x1-fastest. Length is n1*n2*n3 for cell fields and 3x that for
/// permeability tensors (K11 block, then K22, then K33).
struct FieldDump {
  std::array<int, 3> dims{0, 0, 0};
  Eigen::VectorXd data;
};

void dumpField(const std::string& path, const std::array<int, 3>& dims,
               const Eigen::VectorXd& data);
void dumpPermeability(const std::string& path, const std::array<int, 3>& dims,
                      const PermeabilityField& field);

FieldDump loadDump(const std::string& path);
CellField loadCellField(const std::string& path, const std::array<int, 3>& expected_dims);
PermeabilityField loadPermeability(const std::string& path,
                                   const std::array<int, 3>& expected_dims);

/// One CSV row per call site; values are written with round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::string& label, const std::vector<double>& values);
  static std::string format(double v);

 private:
  std::string path_;
  std::string body_;
  void flush();
};

}  // namespace mrcm
