#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "evonas/fitness.hpp"
#include "evonas/population.hpp"

namespace evonas {

/// Progressive Dynamic Hurdles state: the step-increment vector s, the
/// models-per-hurdle count m, and the growing hurdle queue h. Hurdles are
/// append-only and there are never more than length(s) - 1 of them.
struct HurdleSchedule {
  std::vector<std::uint64_t> step_increments;
  int models_per_hurdle = 1000;
  std::vector<double> hurdles;

  std::uint64_t max_cumulative_steps() const {
    std::uint64_t total = 0;
    for (std::uint64_t s : step_increments) total += s;
    return total;
  }
};

struct BudgetLedger {
  std::uint64_t total_steps_consumed = 0;
  std::map<std::uint64_t, std::uint64_t> per_model_steps;  // genome id -> steps
  std::uint64_t models_evaluated = 0;

  void record_steps(std::uint64_t genome_id, std::uint64_t steps) {
    total_steps_consumed += steps;
    per_model_steps[genome_id] += steps;
  }

  void merge(const BudgetLedger& other) {
    total_steps_consumed += other.total_steps_consumed;
    models_evaluated += other.models_evaluated;
    for (const auto& [id, steps] : other.per_model_steps) per_model_steps[id] += steps;
  }
};

struct GateRecord {
  int hurdle_index = 0;
  double hurdle = 0.0;
  double fitness = 0.0;
  bool passed = false;
  std::uint64_t cumulative_steps = 0;
};

struct HurdleOutcome {
  double fitness = 0.0;
  std::uint64_t steps_used = 0;
  std::vector<GateRecord> gates;  // real-hurdle comparisons only
};

/// Fitness with hurdles: train s_0 and evaluate, then while the fitness
/// exceeds the next hurdle train the next increment and re-evaluate. The
/// hurdle queue carries an implicit trailing infinity, so a model passing
/// every real hurdle trains exactly sum(s) steps. A fitness exactly at a
/// hurdle stops (the comparison is strictly greater). Requires
/// length(hurdles) < length(step_increments).
HurdleOutcome fitness_with_hurdles(const Genome& genome, const HurdleSchedule& schedule,
                                   const Evaluator& evaluator, BudgetLedger& ledger);

/// Mean fitness over exactly the individuals whose steps_trained equals the
/// population's maximum; with everyone at s_0 this is the plain population
/// mean. Population must be non-empty.
double mean_fitness_of_max(const Population& population);

/// Appends mean_fitness_of_max as a new hurdle and resets the counter once
/// models_since_last_hurdle reaches m, unless length(s) - 1 hurdles already
/// exist (the terminal phase runs with all hurdles in place). Returns whether
/// a hurdle was created.
bool maybe_create_hurdle(HurdleSchedule& schedule, const Population& population,
                         std::uint64_t& models_since_last_hurdle);

}  // namespace evonas
