#include "evonas/pdh.hpp"

#include <limits>
#include <stdexcept>

namespace evonas {

HurdleOutcome fitness_with_hurdles(const Genome& genome, const HurdleSchedule& schedule,
                                   const Evaluator& evaluator, BudgetLedger& ledger) {
  const std::vector<std::uint64_t>& s = schedule.step_increments;
  if (s.empty()) throw std::invalid_argument("step_increments must be non-empty");
  if (schedule.hurdles.size() >= s.size())
    throw std::invalid_argument("hurdle queue must be shorter than step_increments");

  const std::uint64_t genome_id = genome_hash(genome);
  ledger.models_evaluated += 1;

  HurdleOutcome outcome;
  int eval_ordinal = 0;
  auto train = [&](std::uint64_t increment) {
    outcome.steps_used += increment;
    ledger.record_steps(genome_id, increment);
  };

  train(s[0]);
  outcome.fitness = evaluator.evaluate(genome, outcome.steps_used, eval_ordinal++);
  std::size_t i = 0;
  while (true) {
    const bool real_hurdle = i < schedule.hurdles.size();
    const double hurdle = real_hurdle ? schedule.hurdles[i]
                                      : std::numeric_limits<double>::infinity();
    if (real_hurdle)
      outcome.gates.push_back(GateRecord{static_cast<int>(i), hurdle, outcome.fitness,
                                         outcome.fitness > hurdle, outcome.steps_used});
    if (!(outcome.fitness > hurdle)) break;
    ++i;
    train(s[i]);
    outcome.fitness = evaluator.evaluate(genome, outcome.steps_used, eval_ordinal++);
  }
  return outcome;
}

double mean_fitness_of_max(const Population& population) {
  if (population.size() == 0)
    throw std::invalid_argument("mean_fitness_of_max: empty population");
  std::uint64_t max_steps = 0;
  for (const Individual& member : population.members())
    max_steps = std::max(max_steps, member.steps_trained);
  double total = 0.0;
  int count = 0;
  for (const Individual& member : population.members()) {
    if (member.steps_trained == max_steps) {
      total += member.fitness;
      ++count;
    }
  }
  return total / count;
}

bool maybe_create_hurdle(HurdleSchedule& schedule, const Population& population,
                         std::uint64_t& models_since_last_hurdle) {
  if (models_since_last_hurdle <
      static_cast<std::uint64_t>(schedule.models_per_hurdle))
    return false;
  if (schedule.hurdles.size() + 1 >= schedule.step_increments.size()) return false;
  schedule.hurdles.push_back(mean_fitness_of_max(population));
  models_since_last_hurdle = 0;
  return true;
}

}  // namespace evonas
