#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evonas/config.hpp"

namespace evonas {

inline constexpr const char* kArmPdhSeeded = "pdh_seeded";
inline constexpr const char* kArmPdhRandom = "pdh_random";

/// One search run inside the ablation grid. Control arms get their child
/// model count from the seeded PDH arm's measured step consumption in the
/// same replication, so arms compare at equal step budgets.
struct ArmRun {
  std::string arm;
  int replication = 0;
  double best_fitness = 0.0;
  double best_true_asymptote = 0.0;  // latent quality of the top-1 by fitness
  std::uint64_t models_evaluated = 0;
  std::uint64_t steps_consumed = 0;
  std::uint64_t configured_budget_steps = 0;
  std::uint64_t target_budget_steps = 0;  // pre-rounding equalization target
  std::uint64_t first_gate_checked = 0;
  std::uint64_t first_gate_stopped = 0;
  std::uint64_t max_steps_per_model = 0;  // sum of the schedule increments
};

struct ArmSummary {
  std::string arm;
  double mean_best_true = 0.0;
  double stdev_best_true = 0.0;
  double mean_models = 0.0;
  double mean_steps = 0.0;
};

struct CsvRow {
  std::uint64_t model_id = 0;
  std::optional<std::uint64_t> parent_id;
  std::uint64_t created_index = 0;
  std::uint64_t steps = 0;
  double fitness = 0.0;
  double true_asymptote = 0.0;
  std::string arm;
  int replication = 0;
};

struct AblationReport {
  std::vector<ArmRun> runs;
  std::vector<ArmSummary> summaries;
  // Fraction of replications where the seeded PDH arm strictly beats each
  // other arm on best true asymptote.
  std::map<std::string, double> pdh_seeded_win_rate;
  // Fraction of replications where the random-seeded arm is the worst arm.
  double random_arm_worst_fraction = 0.0;
  std::vector<CsvRow> rows;
};

/// Runs the full grid: seeded PDH, random-seeded PDH, and one fixed-step
/// control per configured step count, budget-equalized per replication.
/// Requires ablation.replications >= 2.
AblationReport run_ablation(const ExperimentConfig& config, std::ostream* progress);

void write_report_csv(const AblationReport& report, const std::string& path);
std::string ablation_summary_text(const AblationReport& report);

}  // namespace evonas
