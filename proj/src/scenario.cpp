// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/scenario.hpp"

#include "mrcm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mrcm {

namespace {

struct ConfigEntry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, ConfigEntry>;

struct ParsedConfig {
  std::map<std::string, Section> sections;
  std::string origin;

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ParsedConfig lex(const std::string& text, const std::string& origin) {
  ParsedConfig cfg;
  cfg.origin = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find_first_of("#;")));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') cfg.fail(lineno, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) cfg.fail(lineno, "empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) cfg.fail(lineno, "expected key = value");
    if (section.empty()) cfg.fail(lineno, "key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) cfg.fail(lineno, "empty key");
    auto [it, inserted] = cfg.sections[section].emplace(key, ConfigEntry{value, lineno});
    if (!inserted)
      cfg.fail(lineno, "duplicate key '" + key + "' in [" + section +
                           "] (first on line " + std::to_string(it->second.line) + ")");
  }
  return cfg;
}

class ConfigReader {
 public:
  ConfigReader(const ParsedConfig& cfg) : cfg_(cfg) {}

  bool has(const std::string& section, const std::string& key) {
    used_[section].insert(key);
    auto s = cfg_.sections.find(section);
    return s != cfg_.sections.end() && s->second.count(key) > 0;
  }

  std::string str(const std::string& section, const std::string& key,
                  const std::string& fallback) {
    used_[section].insert(key);
    auto s = cfg_.sections.find(section);
    if (s == cfg_.sections.end()) return fallback;
    auto e = s->second.find(key);
    return e == s->second.end() ? fallback : e->second.value;
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    if (!has(section, key)) return fallback;
    const ConfigEntry& e = cfg_.sections.at(section).at(key);
    double v = 0.0;
    auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc{} || p != e.value.data() + e.value.size())
      cfg_.fail(e.line, "expected a number for '" + key + "', got '" + e.value + "'");
    return v;
  }

  long integer(const std::string& section, const std::string& key, long fallback) {
    if (!has(section, key)) return fallback;
    const ConfigEntry& e = cfg_.sections.at(section).at(key);
    long v = 0;
    auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc{} || p != e.value.data() + e.value.size())
      cfg_.fail(e.line, "expected an integer for '" + key + "', got '" + e.value + "'");
    return v;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) {
    if (!has(section, key)) return fallback;
    const ConfigEntry& e = cfg_.sections.at(section).at(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    cfg_.fail(e.line, "expected true/false for '" + key + "'");
  }

  template <std::size_t N, typename T>
  std::array<T, N> tuple(const std::string& section, const std::string& key,
                         const std::array<T, N>& fallback) {
    if (!has(section, key)) return fallback;
    const ConfigEntry& e = cfg_.sections.at(section).at(key);
    std::array<T, N> out{};
    std::istringstream ss(e.value);
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',')) {
      if (i >= N) cfg_.fail(e.line, "'" + key + "' takes " + std::to_string(N) + " values");
      std::istringstream vs(trim(tok));
      if (!(vs >> out[i]) || !vs.eof())
        cfg_.fail(e.line, "bad value in '" + key + "': '" + tok + "'");
      ++i;
    }
    if (i != N) cfg_.fail(e.line, "'" + key + "' takes " + std::to_string(N) + " values");
    return out;
  }

  int lineOf(const std::string& section, const std::string& key) const {
    return cfg_.sections.at(section).at(key).line;
  }

  [[noreturn]] void failAt(const std::string& section, const std::string& key,
                           const std::string& what) const {
    cfg_.fail(lineOf(section, key), what);
  }

  /// Every key present in the file must have been consumed by the schema.
  void rejectUnknown() const {
    for (const auto& [section, entries] : cfg_.sections) {
      auto u = used_.find(section);
      if (u == used_.end())
        cfg_.fail(entries.begin()->second.line, "unknown section [" + section + "]");
      for (const auto& [key, entry] : entries)
        if (!u->second.count(key))
          cfg_.fail(entry.line, "unknown key '" + key + "' in [" + section + "]");
    }
  }

 private:
  const ParsedConfig& cfg_;
  std::map<std::string, std::set<std::string>> used_;
};

}  // namespace

Scenario parseConfigText(const std::string& text, const std::string& origin) {
  const ParsedConfig cfg = lex(text, origin);
  ConfigReader r(cfg);
  Scenario sc;

  sc.grid_dims = r.tuple<3, int>("grid", "dims", {1, 1, 1});
  sc.extents = r.tuple<3, double>("grid", "extents", {1.0, 1.0, 1.0});

  const std::string source = r.str("perm", "source", "uniform");
  if (source == "uniform") sc.perm.source = PermSpec::Source::Uniform;
  else if (source == "generate") sc.perm.source = PermSpec::Source::Generate;
  else if (source == "import") sc.perm.source = PermSpec::Source::Import;
  else r.failAt("perm", "source", "source must be uniform|generate|import");
  sc.perm.value = r.number("perm", "value", sc.perm.value);
  sc.perm.seed = static_cast<std::uint64_t>(r.integer("perm", "seed", 1));
  sc.perm.contrast = r.number("perm", "contrast", sc.perm.contrast);
  sc.perm.sigma = r.number("perm", "sigma", sc.perm.sigma);
  sc.perm.file = r.str("perm", "file", "");
  sc.perm.file_dims = r.tuple<3, int>("perm", "file_dims", sc.grid_dims);
  sc.perm.layer_lo = static_cast<int>(r.integer("perm", "layer_lo", 0));
  sc.perm.layer_count = static_cast<int>(r.integer("perm", "layer_count", -1));
  sc.perm.theta = r.number("perm", "theta", 1.0);
  sc.perm.refine = r.tuple<3, int>("perm", "refine", {1, 1, 1});

  const std::string bckind = r.str("bc", "kind", "no-flow");
  if (bckind == "no-flow") sc.bc.kind = BcSpec::Kind::NoFlow;
  else if (bckind == "pressure-x1") sc.bc.kind = BcSpec::Kind::PressureX1;
  else r.failAt("bc", "kind", "kind must be no-flow|pressure-x1");
  sc.bc.p_lo = r.number("bc", "p_lo", 1.0);
  sc.bc.p_hi = r.number("bc", "p_hi", 0.0);

  sc.five_spot = r.flag("wells", "five_spot", false);
  sc.pvi_rate = r.number("wells", "pvi_rate", sc.pvi_rate);
  sc.producer_split = r.tuple<4, double>("wells", "split", sc.producer_split);

  sc.fluid.mu_w = r.number("fluid", "mu_w", sc.fluid.mu_w);
  sc.fluid.mu_o = r.number("fluid", "mu_o", sc.fluid.mu_o);

  sc.nd = r.tuple<3, int>("mrcm", "nd", sc.nd);
  sc.hbar = r.tuple<3, int>("mrcm", "hbar", sc.hbar);
  sc.alpha = r.number("mrcm", "alpha", 1.0);

  sc.impes.skip = static_cast<int>(r.integer("impes", "skip", 600));
  sc.impes.sigma_cfl = r.number("impes", "sigma_cfl", 0.9);
  sc.impes.t_end_pvi = r.number("impes", "t_end_pvi", 0.1);
  sc.impes.dt_cap = r.number("impes", "dt_cap", sc.impes.dt_cap);
  const std::string driver = r.str("impes", "driver", "fine");
  if (driver == "fine") sc.driver = DarcyDriver::Fine;
  else if (driver == "mrcm") sc.driver = DarcyDriver::Mrcm;
  else r.failAt("impes", "driver", "driver must be fine|mrcm");

  const std::string fine = r.str("solver", "fine", "direct");
  if (fine == "direct") sc.fine_solver = FineSolver::Direct;
  else if (fine == "krylov") sc.fine_solver = FineSolver::Krylov;
  else r.failAt("solver", "fine", "fine must be direct|krylov");
  sc.krylov.tol = r.number("solver", "tol", sc.krylov.tol);
  sc.krylov.max_it = static_cast<int>(r.integer("solver", "max_it", sc.krylov.max_it));
  const std::string precond = r.str("solver", "precond", "jacobi");
  if (precond == "jacobi") sc.krylov.precond = Preconditioner::Jacobi;
  else if (precond == "none") sc.krylov.precond = Preconditioner::None;
  else r.failAt("solver", "precond", "precond must be jacobi|none");
  sc.unknown_cap = r.integer("solver", "cap", sc.unknown_cap);
  sc.workers = static_cast<int>(r.integer("solver", "workers", 0));

  r.rejectUnknown();

  // Invariant checks, collected so a bad config reports everything at once.
  std::vector<std::string> problems;
  for (int a = 0; a < 3; ++a) {
    if (sc.grid_dims[a] < 1) problems.push_back("grid dims must be positive");
    if (!(sc.extents[a] > 0)) problems.push_back("grid extents must be positive");
    if (sc.nd[a] < 1) problems.push_back("mrcm nd must be positive");
    if (sc.grid_dims[a] % sc.nd[a] != 0)
      problems.push_back("mrcm nd must divide the grid dims");
    if (sc.perm.refine[a] < 1) problems.push_back("perm refine factors must be >= 1");
  }
  if (!(sc.fluid.mu_w > 0) || !(sc.fluid.mu_o > 0))
    problems.push_back("viscosities must be positive");
  if (!(sc.alpha > 0)) problems.push_back("mrcm alpha must be positive");
  if (sc.impes.skip < 1) problems.push_back("impes skip must be >= 1");
  if (!(sc.impes.sigma_cfl > 0 && sc.impes.sigma_cfl <= 1))
    problems.push_back("impes sigma_cfl must lie in (0,1]");
  if (sc.perm.source == PermSpec::Source::Generate && sc.perm.contrast < 1)
    problems.push_back("perm contrast must be >= 1");
  if (sc.perm.sigma < 0) problems.push_back("perm sigma must be >= 0");
  if (sc.perm.source == PermSpec::Source::Import && sc.perm.file.empty())
    problems.push_back("perm import requires file=");
  if (sc.perm.theta < 0) problems.push_back("perm theta must be >= 0");
  const double split_sum = sc.producer_split[0] + sc.producer_split[1] +
                           sc.producer_split[2] + sc.producer_split[3];
  if (std::abs(split_sum - 1.0) > 1e-12)
    problems.push_back("wells split must sum to 1");
  if (sc.five_spot && !(sc.pvi_rate > 0))
    problems.push_back("wells pvi_rate must be positive");
  if (sc.five_spot) {
    try {
      buildFiveSpot(scenarioGrid(sc), std::max(sc.pvi_rate, 1e-30),
                    sc.producer_split);
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = origin + ": invalid scenario:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw std::runtime_error(msg);
  }
  return sc;
}

Scenario parseConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfigText(ss.str(), path);
}

StructuredGrid scenarioGrid(const Scenario& sc) {
  std::array<int, 3> dims;
  for (int a = 0; a < 3; ++a) dims[a] = sc.grid_dims[a];
  return makeGrid(dims, sc.extents);
}

PermeabilityField buildPermeability(const Scenario& sc, const StructuredGrid& grid) {
  PermeabilityField k;
  std::array<int, 3> base_dims = grid.dims;
  const bool refined = sc.perm.refine != std::array<int, 3>{1, 1, 1};
  if (refined)
    for (int a = 0; a < 3; ++a) {
      if (grid.dims[a] % sc.perm.refine[a] != 0)
        throw std::runtime_error("refine factors must divide the grid dims");
      base_dims[a] = grid.dims[a] / sc.perm.refine[a];
    }
  const StructuredGrid base = makeGrid(base_dims, grid.extents);

  switch (sc.perm.source) {
    case PermSpec::Source::Uniform:
      k = uniformPermeability(base, sc.perm.value);
      break;
    case PermSpec::Source::Generate:
      k = channelField(base, sc.perm.seed, sc.perm.contrast, sc.perm.sigma);
      break;
    case PermSpec::Source::Import: {
      if (sc.perm.file.size() > 10 &&
          sc.perm.file.substr(sc.perm.file.size() - 10) == ".mrcmfield") {
        k = loadPermeability(sc.perm.file, base.dims);
      } else {
        k = importSpe10(sc.perm.file, sc.perm.file_dims, sc.perm.layer_lo,
                        sc.perm.layer_count);
        const int layers = sc.perm.layer_count < 0
                               ? sc.perm.file_dims[2] - sc.perm.layer_lo
                               : sc.perm.layer_count;
        if (base.dims != std::array<int, 3>{sc.perm.file_dims[0],
                                            sc.perm.file_dims[1], layers})
          throw std::runtime_error(
              "imported field dims do not match the (pre-refinement) grid");
      }
      break;
    }
  }
  if (sc.perm.theta != 1.0) k = applyContrastExponent(k, sc.perm.theta);
  if (refined) k = refineField(k, base.dims, sc.perm.refine);
  validatePermeability(k);
  return k;
}

BoundarySpec buildBc(const Scenario& sc, const StructuredGrid&) {
  if (sc.bc.kind == BcSpec::Kind::PressureX1)
    return pressureDriveBc(0, sc.bc.p_lo, sc.bc.p_hi);
  return noFlowBc();
}

DarcyConfig darcyConfig(const Scenario& sc) {
  DarcyConfig dc;
  dc.driver = sc.driver;
  dc.nd = sc.nd;
  dc.hbar_cells = sc.hbar;
  dc.alpha = sc.alpha;
  dc.fine_solver = sc.fine_solver;
  dc.krylov = sc.krylov;
  dc.unknown_cap = sc.unknown_cap;
  return dc;
}

Wells buildFiveSpot(const StructuredGrid& grid, double pvi_rate,
                    const std::array<double, 4>& producer_split) {
  const int n1 = grid.dims[0], n2 = grid.dims[1], n3 = grid.dims[2];
  // Footprint scaled from the reference layout: a well column spans 1/60 of
  // the x1 cells and 1/220 of the x2 cells, full height, at least one cell.
  const int wx = std::max(1, n1 / 60);
  const int wy = std::max(1, n2 / 220);
  const Box injector{{(n1 - wx) / 2, (n2 - wy) / 2, 0}, {wx, wy, n3}};
  const std::array<Box, 4> producers{
      Box{{0, 0, 0}, {wx, wy, n3}},
      Box{{n1 - wx, 0, 0}, {wx, wy, n3}},
      Box{{0, n2 - wy, 0}, {wx, wy, n3}},
      Box{{n1 - wx, n2 - wy, 0}, {wx, wy, n3}},
  };
  for (const Box& b : producers)
    if (b.overlaps(injector))
      throw std::runtime_error("five-spot wells overlap: grid too small");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (producers[i].overlaps(producers[j]))
        throw std::runtime_error("five-spot wells overlap: grid too small");

  const double pore_volume = grid.extents[0] * grid.extents[1] * grid.extents[2];
  const double rate = pvi_rate * pore_volume;
  Wells wells;
  wells.injectors.push_back({injector, rate});
  for (int i = 0; i < 4; ++i)
    wells.producers.push_back({producers[i], -rate * producer_split[i]});
  return wells;
}

void writeRunReport(const std::string& path, const RunReport& report,
                    const std::string& name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "run: " << name << "\n";
  out << "errors: e_p=" << report.errors.pressure_error
      << " e_v=" << report.errors.velocity_error
      << " max_dp=" << report.errors.max_pressure_jump
      << " max_du=" << report.errors.max_flux_jump << "\n";
  if (report.krylov_iterations > 0)
    out << "krylov iterations: " << report.krylov_iterations << "\n";
  for (const auto& [stage, seconds] : report.timings.stages)
    out << "time " << stage << ": " << seconds << " s\n";
  for (const auto& [flag, ok] : report.flags)
    out << "check " << flag << ": " << (ok ? "pass" : "FAIL") << "\n";
}

void writeProductionCsv(const std::string& path, const ProductionRecord& record) {
  CsvWriter csv(path, "t_pvi,oil_fraction,w1,w2,w3,w4");
  for (const ProductionSample& s : record.samples) {
    std::vector<std::string> row{CsvWriter::format(s.t_pvi),
                                 CsvWriter::format(s.oil_fraction)};
    for (int i = 0; i < 4; ++i)
      row.push_back(CsvWriter::format(
          i < static_cast<int>(s.watercut.size()) ? s.watercut[i] : 0.0));
    csv.row(row);
  }
}

void writeTimingsCsv(const std::string& path, const StageTimings& timings,
                     const std::string& name) {
  CsvWriter csv(path, "stage,name,seconds");
  for (const auto& [stage, seconds] : timings.stages)
    csv.row({stage, name, CsvWriter::format(seconds)});
}

void writeErrorCsv(const std::string& path, const ErrorReport& report) {
  CsvWriter csv(path, "e_p,e_v,max_pressure_jump,max_flux_jump");
  csv.row({CsvWriter::format(report.pressure_error),
           CsvWriter::format(report.velocity_error),
           CsvWriter::format(report.max_pressure_jump),
           CsvWriter::format(report.max_flux_jump)});
}

std::vector<LocalSolverSample> benchLocalSolver(const std::vector<int>& box_sizes,
                                                int nrhs) {
  std::vector<LocalSolverSample> out;
  for (int n : box_sizes) {
    const StructuredGrid grid = makeGrid({n, n, n}, {1.0, 1.0, 1.0});
    const PermeabilityField k = uniformPermeability(grid, 1.0);
    const BoundarySpec bc = pressureDriveBc(0, 1.0, 0.0);
    const SparseSystem sys = assemble(Subgrid::whole(grid), k, bc, {});

    LocalSolverSample sample;
    sample.cells = grid.cellCount();
    StopWatch watch;
    const Factorization fact = factorize(sys);
    sample.factor_seconds = watch.seconds();

    Eigen::MatrixXd rhs(grid.cellCount(), nrhs);
    for (int c = 0; c < nrhs; ++c)
      for (int i = 0; i < grid.cellCount(); ++i)
        rhs(i, c) = std::sin(0.01 * (i + 1) * (c + 1));
    watch.restart();
    const Eigen::MatrixXd sol = fact.solveMulti(rhs);
    sample.per_rhs_seconds = watch.seconds() / nrhs;
    if (!sol.allFinite()) throw std::runtime_error("local bench solve failed");
    out.push_back(sample);
  }
  return out;
}

std::vector<SweepSample> benchSubdomainSweep(
    const StructuredGrid& grid, const PermeabilityField& k,
    const std::vector<std::array<int, 3>>& nds, const WorkerPool& pool) {
  std::vector<SweepSample> out;
  const BoundarySpec bc = noFlowBc();
  const Wells wells = buildFiveSpot(grid, 0.2, {0.25, 0.25, 0.25, 0.25});
  const CellField f = wellSource(grid, wells);
  for (const auto& nd : nds) {
    const DomainDecomposition dd = decompose(grid, nd);
    const InterfaceSpace space = buildInterfaceSpace(dd, dd.sub_cells);
    const MultiscaleSolution sol = solveMrcm(dd, space, k, bc, f, 1.0, pool);
    SweepSample s;
    s.nd = nd;
    s.interface_dofs = 2 * space.basis_count;
    s.mbf_seconds = sol.timings.get("mbfs");
    s.interface_seconds = sol.timings.get("interface_assembly") +
                          sol.timings.get("interface_solve");
    s.reconstruct_seconds = sol.timings.get("reconstruct");
    out.push_back(s);
  }
  return out;
}

}  // namespace mrcm
