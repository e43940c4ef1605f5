#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gibbsfit/posterior.hpp"
#include "gibbsfit/simulate.hpp"

namespace gibbsfit {

enum class ScenarioKind {
  partition_limit,
  posterior_concentration,
  direct_gibbs,
  hidden_gibbs,
  misspecified,
};

std::string to_string(ScenarioKind kind);

/// One self-contained experiment: scenario name, input files, observation
/// schedule, replicate count, master seed and inverse temperature.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::partition_limit;
  std::filesystem::path base_dir;  // directory of the config file
  std::filesystem::path sft_file;
  std::filesystem::path family_file;
  std::filesystem::path loss_file;
  std::optional<double> theta_star;
  std::vector<std::size_t> n_schedule;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  double beta = 1.0;
  std::filesystem::path output_dir = "out";
  double radius = 0.05;
  int audit_depth = 8;
  bool expect_zero_limit = false;
  bool dump_observations = false;
  std::string source_name;
  MisspecifiedParams source_params;
};

ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct RunOptions {
  int threads = 1;
  std::optional<std::filesystem::path> output_dir_override;  // flag > env > config
  std::optional<std::uint64_t> seed_override;
};

struct CheckRow {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ScenarioResult {
  bool pass = false;
  std::vector<CheckRow> checks;
  std::filesystem::path output_dir;
  RateTable rates;
  std::vector<std::size_t> theta_min_set;
};

/// Runs the scenario and writes rate tables, posterior dumps, concentration
/// reports and a pass/fail summary under the output directory.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});
ScenarioResult run_scenario_file(const std::filesystem::path& config_path,
                                 const RunOptions& options = {});

/// Non-mutating dry run: parses, builds the shift and family, runs the mixing
/// and regularity checks. Returns diagnostics; empty means valid.
std::vector<std::string> validate_scenario_file(const std::filesystem::path& config_path);

/// Environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnvVar = "GIBBSFIT_OUTPUT_DIR";

}  // namespace gibbsfit
