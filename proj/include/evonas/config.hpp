#pragma once

#include <string>
#include <vector>

#include "evonas/evolution.hpp"
#include "evonas/fitness.hpp"

namespace evonas {

struct AblationConfig {
  int replications = 20;
  // Fixed-step control arms: half increment, increment, max cumulative and
  // full-budget analogues of the published controls.
  std::vector<std::uint64_t> fixed_step_arms = {5, 10, 30, 100};
};

struct ExperimentConfig {
  std::string name = "custom";
  SearchConfig search;
  OracleConfig oracle;
  std::uint64_t oracle_seed = 1;
  AblationConfig ablation;
  std::string output_dir = "out";
};

/// Named presets. "desk" is the small ablation-ready setup; "desk-5.1" and
/// "desk-5.2" shrink the published schedules' step counts by 1000x;
/// "paper-5.1" and "paper-5.2" carry the published step counts verbatim.
ExperimentConfig make_preset(const std::string& name);
const std::vector<std::string>& preset_names();

std::string experiment_to_json_text(const ExperimentConfig& config);
ExperimentConfig experiment_from_json_text(const std::string& text);
ExperimentConfig load_experiment_file(const std::string& path);
void save_experiment_file(const ExperimentConfig& config, const std::string& path);

}  // namespace evonas
