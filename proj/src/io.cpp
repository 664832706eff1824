// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "MRCMFIELD payload is little-endian; big-endian hosts unsupported");

namespace mrcm {

namespace {

std::string headerLine(const std::array<int, 3>& dims) {
  std::ostringstream os;
  os << "MRCMFIELD v1 " << dims[0] << ' ' << dims[1] << ' ' << dims[2]
     << " f64 x-fastest\n";
  return os.str();
}

}  // namespace

void dumpField(const std::string& path, const std::array<int, 3>& dims,
               const Eigen::VectorXd& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::string header = headerLine(dims);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void dumpPermeability(const std::string& path, const std::array<int, 3>& dims,
                      const PermeabilityField& field) {
  Eigen::VectorXd packed(3 * field.cells());
  packed << field.k11.matrix(), field.k22.matrix(), field.k33.matrix();
  dumpField(path, dims, packed);
}

FieldDump loadDump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("missing header: " + path);
  std::istringstream hs(header);
  std::string magic, version, type, order;
  FieldDump dump;
  hs >> magic >> version >> dump.dims[0] >> dump.dims[1] >> dump.dims[2] >> type >> order;
  if (!hs || magic != "MRCMFIELD" || version != "v1" || type != "f64" ||
      order != "x-fastest")
    throw std::runtime_error("bad MRCMFIELD header in " + path + ": " + header);
  const std::int64_t n =
      std::int64_t(dump.dims[0]) * dump.dims[1] * dump.dims[2];
  if (n <= 0) throw std::runtime_error("bad dims in " + path);

  in.seekg(0, std::ios::end);
  const std::int64_t payload =
      static_cast<std::int64_t>(in.tellg()) - static_cast<std::int64_t>(headerLine(dump.dims).size());
  if (payload != std::int64_t(sizeof(double)) * n &&
      payload != std::int64_t(sizeof(double)) * 3 * n)
    throw std::runtime_error("payload size mismatch in " + path);
  in.seekg(static_cast<std::streamoff>(headerLine(dump.dims).size()));
  dump.data.resize(payload / std::int64_t(sizeof(double)));
  in.read(reinterpret_cast<char*>(dump.data.data()), payload);
  if (!in) throw std::runtime_error("short read: " + path);
  return dump;
}

CellField loadCellField(const std::string& path,
                        const std::array<int, 3>& expected_dims) {
  FieldDump dump = loadDump(path);
  if (dump.dims != expected_dims)
    throw std::runtime_error("dims mismatch loading " + path);
  if (dump.data.size() != std::int64_t(dump.dims[0]) * dump.dims[1] * dump.dims[2])
    throw std::runtime_error(path + " is not a scalar cell field");
  return dump.data;
}

PermeabilityField loadPermeability(const std::string& path,
                                   const std::array<int, 3>& expected_dims) {
  FieldDump dump = loadDump(path);
  if (dump.dims != expected_dims)
    throw std::runtime_error("dims mismatch loading " + path);
  const Eigen::Index n = Eigen::Index(dump.dims[0]) * dump.dims[1] * dump.dims[2];
  if (dump.data.size() != 3 * n)
    throw std::runtime_error(path + " is not a permeability dump");
  PermeabilityField f(static_cast<int>(n));
  f.k11 = dump.data.segment(0, n).array();
  f.k22 = dump.data.segment(n, n).array();
  f.k33 = dump.data.segment(2 * n, n).array();
  return f;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : path_(path), body_(header + "\n") {
  flush();
}

std::string CsvWriter::format(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    body_ += cells[i];
    body_ += (i + 1 < cells.size()) ? "," : "\n";
  }
  flush();
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
  std::vector<std::string> cells{label};
  for (double v : values) cells.push_back(format(v));
  row(cells);
}

void CsvWriter::flush() {
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path_);
  out.write(body_.data(), static_cast<std::streamsize>(body_.size()));
}

}  // namespace mrcm
