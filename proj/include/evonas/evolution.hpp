#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "evonas/events.hpp"
#include "evonas/pdh.hpp"
#include "evonas/population.hpp"
#include "evonas/sampling.hpp"
#include "evonas/validate.hpp"

namespace evonas {

/// Invalid or inconsistent configuration; maps to CLI exit code 2. The
/// message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class SeedMode { kTransformerSeed, kRandom };

enum class FitnessModeKind { kPdh, kFixedSteps };

struct FitnessMode {
  FitnessModeKind kind = FitnessModeKind::kPdh;
  // PDH parameters.
  std::vector<std::uint64_t> step_increments = {10, 10, 10};
  int models_per_hurdle = 50;
  // Fixed-step parameter.
  std::uint64_t fixed_steps = 30;
};

/// Scheduled mid-search change: drop the mutation rate and optionally re-add
/// NONE to the normalization vocabulary once this many child models exist.
struct MutationSwitch {
  std::uint64_t at_child_models = 0;
  double new_rate = 0.01;
  bool readd_none_normalization = true;
};

struct SearchConfig {
  SeedMode seed_mode = SeedMode::kTransformerSeed;
  int population_capacity = 100;
  int parent_subpop_size = 30;
  int kill_subpop_size = 30;
  double mutation_rate = 0.025;
  std::optional<MutationSwitch> mutation_switch;
  FitnessMode fitness_mode;
  // Exactly one budget is active; the model budget counts child models
  // produced after initialization.
  std::optional<std::uint64_t> total_model_budget;
  std::optional<std::uint64_t> total_step_budget;
  int worker_count = 1;
  std::uint64_t rng_seed = 0;
  // Whether initial-population evaluations advance the first hurdle's
  // models-per-hurdle counter (logged either way so both readings audit).
  bool count_init_toward_hurdle = true;
  int max_consecutive_failures = 10;
  ValidationConfig validation;
};

/// Throws ConfigError naming the first offending field.
void check_config(const SearchConfig& config);

/// Owner-side state of a running search; checkpoints serialize it whole.
struct SearchState {
  SearchConfig config;
  Population population;
  HurdleSchedule schedule;
  BudgetLedger ledger;
  std::mt19937_64 rng;
  std::uint64_t next_model_id = 0;
  std::uint64_t children_produced = 0;
  std::uint64_t models_since_last_hurdle = 0;
  std::uint64_t event_count = 0;
  bool mutation_switch_applied = false;
  int consecutive_failures = 0;
  bool aborted = false;
  std::vector<Individual> evaluated;  // every model ever assigned a fitness
};

/// Final owner state plus the events emitted by this run segment (a resumed
/// run reports only its continuation events; the state carries the full
/// roster either way).
struct SearchResult {
  SearchState state;
  std::vector<Event> events;

  const Population& population() const { return state.population; }
  const BudgetLedger& ledger() const { return state.ledger; }
  const HurdleSchedule& schedule() const { return state.schedule; }
  bool aborted() const { return state.aborted; }
};

/// Samples subpop_size members uniformly without replacement and returns the
/// highest-fitness one; ties break toward the lower created_index.
const Individual& select_parent(const Population& population, int subpop_size,
                                std::mt19937_64& rng);

/// Samples subpop_size members, removes the lowest-fitness one (ties break
/// toward the higher created_index) and inserts the child. Size is unchanged.
/// Returns the removed individual.
Individual kill_and_insert(Population& population, Individual child, int subpop_size,
                           std::mt19937_64& rng);

/// Initializes state and evaluates the seed population (TRANSFORMER_SEED
/// fills every slot with the Transformer genome; RANDOM samples
/// validate-passing genomes), then runs parent-selection -> mutate ->
/// evaluate -> kill-and-insert until the budget is exhausted. With
/// worker_count = 1 the run is a deterministic function of the config.
SearchResult run_search(const SearchConfig& config, const Evaluator& evaluator,
                        const EventSink& sink = {});

/// Continues a checkpointed search to the (possibly updated) budget.
SearchResult resume_search(SearchState state, const Evaluator& evaluator,
                           const EventSink& sink = {});

/// k highest-fitness individuals ever evaluated, ties toward earlier
/// creation; returns fewer when fewer were evaluated.
std::vector<Individual> top_k(const SearchResult& result, std::size_t k);

}  // namespace evonas
