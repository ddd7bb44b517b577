#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandgap/interior.hpp"

namespace bandgap {

struct RunConfig {
  MediumSpec medium;
  nlohmann::json medium_json;
  double h = 1.0 / 40.0;
  SolverOptions solver;
  double cap = 20.0;
  int k_grid = 64;
  int band_count = 10;
  int beta_count = 24;
  int alpha2_count = 40;
  int branches = 1;
  int n_rec = 8;
  int q_bands = 1;
  double raster_spacing = 0.025;
  std::vector<int> n_cells{2, 4, 6, 8};
  std::optional<double> beta;
  std::optional<double> omega2;
  int branch = 1;
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  bool strict = false;

  /// Resolved config echoed into every output header.
  nlohmann::json to_json() const;
};

/// Builds a config from a JSON object. Relative file paths inside it are
/// resolved against base_dir. Throws ConfigError on unknown keys or
/// invalid values.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);
void validate(const RunConfig& cfg);

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kSolverFailure = 2, kPartial = 3 };

int cmd_bands(const RunConfig& cfg);
int cmd_scan(const RunConfig& cfg);
int cmd_solve(const RunConfig& cfg);
int cmd_mode(const RunConfig& cfg);
int cmd_compare_supercell(const RunConfig& cfg);
int cmd_selftest(const RunConfig& cfg);

/// Entry point of the bandgap_dtn executable.
int run_cli(int argc, char** argv);

}  // namespace bandgap
