#include "evonas/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "evonas/evolution.hpp"

namespace evonas {

namespace {

std::uint64_t arm_rng_seed(std::uint64_t base, int replication, int arm_index) {
  return base + 7919ull * static_cast<std::uint64_t>(replication) +
         104729ull * static_cast<std::uint64_t>(arm_index + 1);
}

ArmRun run_arm(const std::string& arm, int replication, const SearchConfig& search,
               const SimulatedOracle& oracle, std::vector<CsvRow>& rows) {
  SearchResult result = run_search(search, oracle);
  ArmRun run;
  run.arm = arm;
  run.replication = replication;
  run.models_evaluated = result.ledger().models_evaluated;
  run.steps_consumed = result.ledger().total_steps_consumed;
  run.max_steps_per_model =
      search.fitness_mode.kind == FitnessModeKind::kPdh
          ? result.schedule().max_cumulative_steps()
          : search.fitness_mode.fixed_steps;

  const std::vector<Individual> best = top_k(result, 1);
  run.best_fitness = best.front().fitness;
  run.best_true_asymptote = oracle.true_asymptote(best.front().genome);

  for (const Event& event : result.events) {
    if (event.type != EventType::kHurdleGate || event.hurdle_index != 0) continue;
    run.first_gate_checked += 1;
    if (!event.passed.value_or(false)) run.first_gate_stopped += 1;
  }

  for (const Individual& member : result.state.evaluated)
    rows.push_back(CsvRow{member.model_id, member.parent_id, member.created_index,
                          member.steps_trained, member.fitness,
                          oracle.true_asymptote(member.genome), arm, replication});
  return run;
}

double mean(const std::vector<double>& xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

double sample_stdev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double total = 0.0;
  for (double x : xs) total += (x - m) * (x - m);
  return std::sqrt(total / static_cast<double>(xs.size() - 1));
}

}  // namespace

AblationReport run_ablation(const ExperimentConfig& config, std::ostream* progress) {
  if (config.ablation.replications < 2)
    throw ConfigError("ablation.replications must be >= 2");
  check_config(config.search);
  if (config.search.fitness_mode.kind != FitnessModeKind::kPdh)
    throw ConfigError("ablation requires a PDH fitness_mode baseline");

  AblationReport report;
  std::vector<std::string> arm_names = {kArmPdhSeeded, kArmPdhRandom};
  for (std::uint64_t steps : config.ablation.fixed_step_arms)
    arm_names.push_back("fixed_" + std::to_string(steps));

  for (int r = 0; r < config.ablation.replications; ++r) {
    const std::uint64_t oracle_seed =
        config.oracle_seed + static_cast<std::uint64_t>(r);
    const SimulatedOracle oracle(config.oracle, oracle_seed);

    // Seeded PDH arm first; its consumption sets the equalized step budget
    // for this replication's control arms.
    SearchConfig seeded = config.search;
    seeded.seed_mode = SeedMode::kTransformerSeed;
    seeded.rng_seed = arm_rng_seed(config.search.rng_seed, r, 0);
    ArmRun seeded_run = run_arm(kArmPdhSeeded, r, seeded, oracle, report.rows);
    const std::uint64_t budget = seeded_run.steps_consumed;
    seeded_run.target_budget_steps = budget;
    seeded_run.configured_budget_steps = budget;
    report.runs.push_back(seeded_run);
    if (progress)
      *progress << "replication " << r << " " << kArmPdhSeeded << ": best_true="
                << seeded_run.best_true_asymptote << " steps=" << budget << "\n";

    SearchConfig random_seeded = config.search;
    random_seeded.seed_mode = SeedMode::kRandom;
    random_seeded.rng_seed = arm_rng_seed(config.search.rng_seed, r, 1);
    ArmRun random_run = run_arm(kArmPdhRandom, r, random_seeded, oracle, report.rows);
    random_run.target_budget_steps = budget;
    random_run.configured_budget_steps = budget;
    report.runs.push_back(random_run);
    if (progress)
      *progress << "replication " << r << " " << kArmPdhRandom << ": best_true="
                << random_run.best_true_asymptote << "\n";

    for (std::size_t a = 0; a < config.ablation.fixed_step_arms.size(); ++a) {
      const std::uint64_t fixed_steps = config.ablation.fixed_step_arms[a];
      const std::uint64_t capacity =
          static_cast<std::uint64_t>(config.search.population_capacity);
      const std::uint64_t total_models = std::max<std::uint64_t>(
          capacity + 1,
          (budget + fixed_steps / 2) / fixed_steps);  // round to nearest
      SearchConfig control = config.search;
      control.seed_mode = SeedMode::kTransformerSeed;
      control.fitness_mode.kind = FitnessModeKind::kFixedSteps;
      control.fitness_mode.fixed_steps = fixed_steps;
      control.total_model_budget = total_models - capacity;  // child models
      control.rng_seed = arm_rng_seed(config.search.rng_seed, r, 2 + static_cast<int>(a));
      const std::string arm = "fixed_" + std::to_string(fixed_steps);
      ArmRun control_run = run_arm(arm, r, control, oracle, report.rows);
      control_run.target_budget_steps = budget;
      control_run.configured_budget_steps = total_models * fixed_steps;
      report.runs.push_back(control_run);
      if (progress)
        *progress << "replication " << r << " " << arm << ": best_true="
                  << control_run.best_true_asymptote
                  << " models=" << control_run.models_evaluated << "\n";
    }
  }

  // Aggregates.
  for (const std::string& arm : arm_names) {
    std::vector<double> bests, models, steps;
    for (const ArmRun& run : report.runs) {
      if (run.arm != arm) continue;
      bests.push_back(run.best_true_asymptote);
      models.push_back(static_cast<double>(run.models_evaluated));
      steps.push_back(static_cast<double>(run.steps_consumed));
    }
    report.summaries.push_back(ArmSummary{arm, mean(bests), sample_stdev(bests),
                                          mean(models), mean(steps)});
  }

  auto best_of = [&report](const std::string& arm, int r) {
    for (const ArmRun& run : report.runs)
      if (run.arm == arm && run.replication == r) return run.best_true_asymptote;
    throw std::logic_error("missing arm run");
  };
  for (const std::string& arm : arm_names) {
    if (arm == kArmPdhSeeded) continue;
    int wins = 0;
    for (int r = 0; r < config.ablation.replications; ++r)
      if (best_of(kArmPdhSeeded, r) > best_of(arm, r)) ++wins;
    report.pdh_seeded_win_rate[arm] =
        static_cast<double>(wins) / config.ablation.replications;
  }
  int random_worst = 0;
  for (int r = 0; r < config.ablation.replications; ++r) {
    const double random_best = best_of(kArmPdhRandom, r);
    bool worst = true;
    for (const std::string& arm : arm_names)
      if (arm != kArmPdhRandom && best_of(arm, r) < random_best) worst = false;
    if (worst) ++random_worst;
  }
  report.random_arm_worst_fraction =
      static_cast<double>(random_worst) / config.ablation.replications;
  return report;
}

void write_report_csv(const AblationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report csv '" + path + "'");
  out << "model_id,parent_id,created_index,steps,fitness,true_asymptote,arm,"
         "replication\n";
  for (const CsvRow& row : report.rows) {
    out << row.model_id << ",";
    if (row.parent_id) out << *row.parent_id;
    out << "," << row.created_index << "," << row.steps << "," << row.fitness << ","
        << row.true_asymptote << "," << row.arm << "," << row.replication << "\n";
  }
}

std::string ablation_summary_text(const AblationReport& report) {
  std::ostringstream out;
  out << "arm, mean_best_true, stdev_best_true, mean_models, mean_steps\n";
  for (const ArmSummary& summary : report.summaries)
    out << summary.arm << ", " << summary.mean_best_true << ", "
        << summary.stdev_best_true << ", " << summary.mean_models << ", "
        << summary.mean_steps << "\n";
  out << "\npdh_seeded win rates:\n";
  for (const auto& [arm, rate] : report.pdh_seeded_win_rate)
    out << "  vs " << arm << ": " << rate << "\n";
  out << "random arm worst fraction: " << report.random_arm_worst_fraction << "\n";
  return out.str();
}

}  // namespace evonas
