#include "bandgap/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bandgap/io.hpp"
#include "bandgap/supercell.hpp"

namespace bandgap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "medium",       "medium_file", "h",          "cap",           "k_grid",         "band_count",
    "beta_count",   "alpha2_count", "branches",  "n_rec",         "q_bands",        "raster_spacing",
    "n_cells",      "beta",        "omega2",     "branch",        "out",            "jobs",
    "riccati_tol",  "tol_circle",  "fixed_point_tol", "edge_tol", "hermitian_bound", "grid_n",
    "mu_count",     "strict"};

template <typename T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / name;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  spdlog::info("writing {}", path.string());
  return os;
}

double require_beta(const RunConfig& cfg) {
  if (!cfg.beta) throw ConfigError("this command needs a quasi-momentum: pass --beta or set \"beta\"");
  return *cfg.beta;
}

BandStructure bands_for(const RunConfig& cfg, double beta) {
  const auto cell = build_cell_mesh(cfg.medium, cfg.h);
  return band_structure(cell, cfg.medium, beta, cfg.k_grid, cfg.band_count, cfg.cap);
}

GuidedModeSolver make_solver(const RunConfig& cfg) { return GuidedModeSolver(cfg.medium, cfg.h, cfg.solver); }

}  // namespace

json RunConfig::to_json() const {
  json ns = n_cells;
  json j{{"medium", medium_json},
         {"h", h},
         {"cap", cap},
         {"k_grid", k_grid},
         {"band_count", band_count},
         {"beta_count", beta_count},
         {"alpha2_count", alpha2_count},
         {"branches", branches},
         {"n_rec", n_rec},
         {"q_bands", q_bands},
         {"raster_spacing", raster_spacing},
         {"n_cells", ns},
         {"branch", branch},
         {"riccati_tol", solver.riccati.riccati_tol},
         {"tol_circle", solver.riccati.tol_circle},
         {"fixed_point_tol", solver.fixed_point_tol},
         {"edge_tol", solver.edge_tol},
         {"hermitian_bound", solver.hermitian_bound},
         {"grid_n", solver.grid_n},
         {"mu_count", solver.mu_count},
         {"strict", strict}};
  if (beta) j["beta"] = *beta;
  if (omega2) j["omega2"] = *omega2;
  return j;
}

RunConfig config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!kKnownKeys.count(k)) throw ConfigError("unknown config key '" + k + "'");
  RunConfig cfg;
  try {
    json medium = "builtin";
    if (j.contains("medium_file")) {
      const fs::path p = base_dir / j.at("medium_file").get<std::string>();
      std::ifstream is(p);
      if (!is) throw ConfigError("cannot read medium file " + p.string());
      medium = json::parse(is);
    } else if (j.contains("medium")) {
      medium = j.at("medium");
    }
    cfg.medium = medium.is_string() ? medium_from_json(json{{"medium", medium}}) : medium_from_json(medium);
    cfg.medium_json = medium_to_json(cfg.medium);
    take(j, "h", cfg.h);
    take(j, "cap", cfg.cap);
    take(j, "k_grid", cfg.k_grid);
    take(j, "band_count", cfg.band_count);
    take(j, "beta_count", cfg.beta_count);
    take(j, "alpha2_count", cfg.alpha2_count);
    take(j, "branches", cfg.branches);
    take(j, "n_rec", cfg.n_rec);
    take(j, "q_bands", cfg.q_bands);
    take(j, "raster_spacing", cfg.raster_spacing);
    take(j, "n_cells", cfg.n_cells);
    take(j, "branch", cfg.branch);
    take(j, "jobs", cfg.jobs);
    take(j, "strict", cfg.strict);
    take(j, "riccati_tol", cfg.solver.riccati.riccati_tol);
    take(j, "tol_circle", cfg.solver.riccati.tol_circle);
    take(j, "fixed_point_tol", cfg.solver.fixed_point_tol);
    take(j, "edge_tol", cfg.solver.edge_tol);
    take(j, "hermitian_bound", cfg.solver.hermitian_bound);
    take(j, "grid_n", cfg.solver.grid_n);
    take(j, "mu_count", cfg.solver.mu_count);
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("omega2")) cfg.omega2 = j.at("omega2").get<double>();
    if (j.contains("out")) cfg.out_dir = base_dir / j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void validate(const RunConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(cfg.h, "h");
  positive(cfg.cap, "cap");
  positive(cfg.raster_spacing, "raster_spacing");
  positive(cfg.solver.riccati.riccati_tol, "riccati_tol");
  positive(cfg.solver.riccati.tol_circle, "tol_circle");
  positive(cfg.solver.fixed_point_tol, "fixed_point_tol");
  positive(cfg.solver.edge_tol, "edge_tol");
  positive(cfg.solver.hermitian_bound, "hermitian_bound");
  if (cfg.h >= 0.5 * std::min(cfg.medium.Lx, cfg.medium.Ly)) throw ConfigError("mesh too coarse: h must be below min(Lx, Ly)/2");
  if (cfg.k_grid < 2 || cfg.beta_count < 2 || cfg.alpha2_count < 2) throw ConfigError("grids need at least 2 points");
  if (cfg.solver.grid_n < 4) throw ConfigError("grid_n must be >= 4");
  if (cfg.band_count < 1) throw ConfigError("band_count must be >= 1");
  if (cfg.solver.mu_count < 1) throw ConfigError("mu_count must be >= 1");
  if (cfg.branch < 1 || cfg.branch > cfg.solver.mu_count) throw ConfigError("branch must lie in 1..mu_count");
  if (cfg.branches < 1 || cfg.branches > cfg.solver.mu_count) throw ConfigError("branches must lie in 1..mu_count");
  if (cfg.n_rec < 1) throw ConfigError("n_rec must be >= 1");
  if (cfg.q_bands < 0) throw ConfigError("q_bands must be >= 0");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.n_cells.empty()) throw ConfigError("n_cells must not be empty");
  for (int n : cfg.n_cells)
    if (n < 1) throw ConfigError("supercell N must be >= 1");
}

int cmd_bands(const RunConfig& cfg) {
  const double beta = require_beta(cfg);
  const auto bs = bands_for(cfg, beta);
  {
    auto os = open_output(cfg, "bands.csv");
    write_header(os, cfg.to_json());
    write_bands_csv(os, bs);
  }
  auto g = gaps_json(bs);
  g["config"] = cfg.to_json();
  auto os = open_output(cfg, "gaps.json");
  os << g.dump(2) << '\n';
  for (const auto& gap : bs.gaps)
    std::cout << "gap " << bs.gap_index(gap.mid()) << ' ' << fmt17(gap.lo) << ' ' << fmt17(gap.hi) << '\n';
  return kSuccess;
}

int cmd_scan(const RunConfig& cfg) {
  const auto solver = make_solver(cfg);
  std::vector<double> betas(cfg.beta_count), alpha2s(cfg.alpha2_count);
  for (int i = 0; i < cfg.beta_count; ++i) betas[i] = std::numbers::pi / cfg.medium.Ly * i / (cfg.beta_count - 1);
  for (int i = 0; i < cfg.alpha2_count; ++i) alpha2s[i] = cfg.cap * i / (cfg.alpha2_count - 1);
  const auto r = solver.isovalue_scan(betas, alpha2s, cfg.branch, cfg.jobs);
  const auto degenerate = std::count(r.mask.begin(), r.mask.end(), 2);
  const auto essential = std::count(r.mask.begin(), r.mask.end(), 1);
  auto os = open_output(cfg, "scan.csv");
  write_header(os, cfg.to_json(), {{"essential_points", essential}, {"degenerate_points", degenerate}});
  write_scan(os, r);
  std::cout << "scan " << r.values.size() << " points, " << essential << " essential, " << degenerate
            << " degenerate\n";
  return cfg.strict && degenerate > 0 ? kPartial : kSuccess;
}

int cmd_solve(const RunConfig& cfg) {
  const double beta = require_beta(cfg);
  const auto bs = bands_for(cfg, beta);
  const auto solver = make_solver(cfg);
  const auto points = solver.solve_all(beta, bs, cfg.branches);
  auto os = open_output(cfg, "points.csv");
  write_header(os, cfg.to_json());
  write_points_csv(os, points);
  for (const auto& p : points)
    std::cout << "omega2 " << fmt17(p.omega2) << " gap " << p.gap_index << " m " << p.branch << '\n';
  return kSuccess;
}

int cmd_mode(const RunConfig& cfg) {
  const double beta = require_beta(cfg);
  if (!cfg.omega2) throw ConfigError("mode needs a frequency seed: pass --omega2 or set \"omega2\"");
  const auto bs = bands_for(cfg, beta);
  const double seed = *cfg.omega2;
  if (bs.gaps.empty()) throw SolverError("no gap below cap at this beta");
  auto distance = [&](const Interval& g) { return g.contains_open(seed) ? 0.0 : std::min(std::abs(seed - g.lo), std::abs(seed - g.hi)); };
  const auto gap = std::min_element(bs.gaps.begin(), bs.gaps.end(),
                                    [&](const Interval& x, const Interval& y) { return distance(x) < distance(y); });
  if (distance(*gap) > 0.0)
    spdlog::warn("omega2 seed {} lies in a band; using the nearest gap ({}, {})", seed, gap->lo, gap->hi);
  const auto solver = make_solver(cfg);
  const auto roots = solver.fixed_point_solve(beta, *gap, cfg.branch, bs.gap_index(gap->mid()));
  if (roots.empty()) throw SolverError("no guided mode in the gap containing " + fmt17(seed));
  const auto best = *std::min_element(roots.begin(), roots.end(), [&](const auto& x, const auto& y) {
    return std::abs(x.omega2 - seed) < std::abs(y.omega2 - seed);
  });
  const auto f = reconstruct(solver, best, cfg.n_rec);
  const json summary{{"beta", best.beta},
                     {"omega2", best.omega2},
                     {"residual", best.residual},
                     {"decay_rate", f.decay_rate},
                     {"interface_jump", f.interface_jump},
                     {"spectral_radius_plus", f.spectral_radius_plus},
                     {"spectral_radius_minus", f.spectral_radius_minus}};
  {
    auto os = open_output(cfg, "mode_field.txt");
    write_header(os, cfg.to_json(), summary);
    write_field(os, extend_band(f, cfg.q_bands, cfg.raster_spacing));
  }
  auto os = open_output(cfg, "cell_norms.csv");
  write_header(os, cfg.to_json(), summary);
  write_cell_norms_csv(os, f);
  std::cout << "omega2 " << fmt17(best.omega2) << " decay_rate " << fmt17(f.decay_rate) << " interface_jump "
            << fmt17(f.interface_jump) << '\n';
  return kSuccess;
}

int cmd_compare_supercell(const RunConfig& cfg) {
  const double beta = require_beta(cfg);
  const auto bs = bands_for(cfg, beta);
  const auto solver = make_solver(cfg);
  const auto points = solver.solve_all(beta, bs, cfg.branches);

  Interval gap;
  double reference = std::numeric_limits<double>::quiet_NaN();
  if (!points.empty()) {
    const auto* chosen = &points.front();
    if (cfg.omega2)
      for (const auto& p : points)
        if (std::abs(p.omega2 - *cfg.omega2) < std::abs(chosen->omega2 - *cfg.omega2)) chosen = &p;
    reference = chosen->omega2;
    for (const auto& g : bs.gaps)
      if (g.contains_open(reference)) gap = g;
  } else if (!bs.gaps.empty()) {
    gap = *std::max_element(bs.gaps.begin(), bs.gaps.end(),
                            [](const Interval& x, const Interval& y) { return x.width() < y.width(); });
  } else {
    throw SolverError("no gap below cap at this beta");
  }
  // Band states crowd the gap edges on a finite supercell; keep the same margin as the DtN search.
  const double margin = cfg.solver.edge_tol * gap.width();
  const Interval inner{gap.lo + margin, gap.hi - margin};

  std::vector<SupercellRow> rows(cfg.n_cells.size());
  parallel_for(static_cast<int>(rows.size()), cfg.jobs, [&](int i) {
    const auto r = supercell_solve(cfg.medium, cfg.h, beta, cfg.n_cells[i], inner);
    rows[i] = {cfg.n_cells[i], r.eigenvalues, reference};
  });
  auto os = open_output(cfg, "supercell.csv");
  write_header(os, cfg.to_json(), {{"gap", {gap.lo, gap.hi}}, {"dtn_omega2", reference}});
  write_supercell_csv(os, rows);
  for (const auto& r : rows) {
    std::cout << "N " << r.n_cells;
    for (double v : r.eigenvalues) std::cout << ' ' << fmt17(v);
    std::cout << '\n';
  }
  return kSuccess;
}

int cmd_selftest(const RunConfig& cfg) {
  (void)cfg;
  bool ok = true;
  auto report = [&](const char* name, bool pass, double value) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << ' ' << fmt17(value) << '\n';
    ok = ok && pass;
  };
  const auto spec = homogeneous_medium();
  const double beta = std::numbers::pi / 2, alpha2 = 0.5;

  HalfGuide hg(spec, 1.0 / 20, Side::Plus);
  const auto ev = hg.evaluate(beta, alpha2);
  if (!ev.in_gap()) {
    report("propagator_in_gap", false, 0.0);
  } else {
    const double expected = std::exp(-std::sqrt(beta * beta - alpha2));
    const double got = ev.propagator().spectral_radius;
    report("propagator_spectral_radius", std::abs(got - expected) <= 0.01 * expected, got);
    report("riccati_residual", ev.propagator().riccati_residual <= 1e-8, ev.propagator().riccati_residual);
  }
  const auto cell = build_cell_mesh(spec, 1.0 / 20);
  const double lowest = bloch_eigenvalues(cell, spec, beta, std::numbers::pi, 1)[0];
  const double fourier = std::numbers::pi * std::numbers::pi + beta * beta;
  report("bloch_fourier_eigenvalue", std::abs(lowest - fourier) <= 0.01 * fourier, lowest);

  GuidedModeSolver solver(spec, 1.0 / 20);
  const auto roots = solver.fixed_point_solve(beta, {0.0, beta * beta}, 1);
  report("no_defect_no_modes", roots.empty(), static_cast<double>(roots.size()));
  return ok ? kSuccess : kSolverFailure;
}

int run_cli(int argc, char** argv) {
  auto logger = spdlog::get("bandgap_dtn");
  if (!logger) logger = spdlog::stderr_color_mt("bandgap_dtn");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("BANDGAP_DTN_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));

  CLI::App app{"Guided modes of line defects in periodic media by exact DtN boundary conditions"};
  std::string command;
  std::string config_path;
  std::optional<double> beta, omega2;
  std::optional<int> branch, jobs;
  std::optional<std::string> out;
  std::vector<int> cells;
  bool strict = false;
  app.add_option("command", command, "bands | scan | solve | mode | compare-supercell | selftest")
      ->required()
      ->check(CLI::IsMember({"bands", "scan", "solve", "mode", "compare-supercell", "selftest"}));
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--beta", beta, "quasi-momentum");
  app.add_option("--omega2", omega2, "frequency seed for mode / compare-supercell");
  app.add_option("--branch", branch, "branch m of mu_m");
  app.add_option("--jobs", jobs, "worker threads for grid sweeps");
  app.add_option("--out", out, "output directory");
  app.add_option("--cells", cells, "supercell half-widths N");
  app.add_flag("--strict", strict, "exit 3 when masked points are present");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kSuccess : kConfigError;
  }

  try {
    RunConfig cfg = config_path.empty() ? config_from_json(json::object()) : load_config(config_path);
    if (beta) cfg.beta = *beta;
    if (omega2) cfg.omega2 = *omega2;
    if (branch) cfg.branch = *branch;
    if (jobs) cfg.jobs = *jobs;
    if (out) cfg.out_dir = *out;
    if (!cells.empty()) cfg.n_cells = cells;
    if (strict) cfg.strict = true;
    validate(cfg);

    if (command == "bands") return cmd_bands(cfg);
    if (command == "scan") return cmd_scan(cfg);
    if (command == "solve") return cmd_solve(cfg);
    if (command == "mode") return cmd_mode(cfg);
    if (command == "compare-supercell") return cmd_compare_supercell(cfg);
    return cmd_selftest(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace bandgap
