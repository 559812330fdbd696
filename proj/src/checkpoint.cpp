#include "evonas/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "evonas/config_json.hpp"
#include "evonas/genome_io.hpp"

namespace evonas {

namespace {

using OrderedJson = nlohmann::ordered_json;

OrderedJson individual_to_json(const Individual& member) {
  OrderedJson j;
  j["model_id"] = member.model_id;
  if (member.parent_id) j["parent_id"] = *member.parent_id;
  j["fitness"] = member.fitness;
  j["steps_trained"] = member.steps_trained;
  j["created_index"] = member.created_index;
  j["genome"] = OrderedJson::parse(serialize(member.genome));
  return j;
}

Individual individual_from_json(const OrderedJson& j) {
  Individual member;
  member.model_id = j.at("model_id").get<std::uint64_t>();
  if (j.contains("parent_id")) member.parent_id = j.at("parent_id").get<std::uint64_t>();
  member.fitness = j.at("fitness").get<double>();
  member.steps_trained = j.at("steps_trained").get<std::uint64_t>();
  member.created_index = j.at("created_index").get<std::uint64_t>();
  member.genome = deserialize(j.at("genome").dump());
  member.genome_id = genome_hash(member.genome);
  return member;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  const SearchState& state = checkpoint.state;
  OrderedJson j;
  j["experiment_name"] = checkpoint.experiment_name;
  j["search_config"] = search_config_to_json(state.config);
  OrderedJson oracle = oracle_config_to_json(checkpoint.oracle);
  oracle["seed"] = checkpoint.oracle_seed;
  j["oracle"] = oracle;

  OrderedJson population = OrderedJson::array();
  for (const Individual& member : state.population.members())
    population.push_back(individual_to_json(member));
  j["population"] = population;
  j["population_capacity"] = state.population.capacity();

  OrderedJson schedule;
  schedule["step_increments"] = state.schedule.step_increments;
  schedule["models_per_hurdle"] = state.schedule.models_per_hurdle;
  schedule["hurdles"] = state.schedule.hurdles;
  j["schedule"] = schedule;

  OrderedJson ledger;
  ledger["total_steps_consumed"] = state.ledger.total_steps_consumed;
  ledger["models_evaluated"] = state.ledger.models_evaluated;
  OrderedJson per_model = OrderedJson::array();
  for (const auto& [id, steps] : state.ledger.per_model_steps)
    per_model.push_back(OrderedJson::array({id, steps}));
  ledger["per_model_steps"] = per_model;
  j["ledger"] = ledger;

  OrderedJson counters;
  counters["next_model_id"] = state.next_model_id;
  counters["children_produced"] = state.children_produced;
  counters["models_since_last_hurdle"] = state.models_since_last_hurdle;
  counters["event_count"] = state.event_count;
  counters["mutation_switch_applied"] = state.mutation_switch_applied;
  counters["consecutive_failures"] = state.consecutive_failures;
  counters["aborted"] = state.aborted;
  j["counters"] = counters;

  std::ostringstream rng_stream;
  rng_stream << state.rng;
  j["rng_state"] = rng_stream.str();

  OrderedJson evaluated = OrderedJson::array();
  for (const Individual& member : state.evaluated)
    evaluated.push_back(individual_to_json(member));
  j["evaluated"] = evaluated;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out << j.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  OrderedJson j = OrderedJson::parse(in);

  Checkpoint checkpoint;
  checkpoint.experiment_name = j.value("experiment_name", "custom");
  SearchState& state = checkpoint.state;
  state.config = search_config_from_json(j.at("search_config"));
  checkpoint.oracle = oracle_config_from_json(j.at("oracle"));
  checkpoint.oracle_seed = j.at("oracle").value("seed", std::uint64_t{1});

  state.population = Population(j.at("population_capacity").get<std::size_t>());
  for (const OrderedJson& item : j.at("population"))
    state.population.add(individual_from_json(item));

  const OrderedJson& schedule = j.at("schedule");
  state.schedule.step_increments =
      schedule.at("step_increments").get<std::vector<std::uint64_t>>();
  state.schedule.models_per_hurdle = schedule.at("models_per_hurdle").get<int>();
  state.schedule.hurdles = schedule.at("hurdles").get<std::vector<double>>();

  const OrderedJson& ledger = j.at("ledger");
  state.ledger.total_steps_consumed =
      ledger.at("total_steps_consumed").get<std::uint64_t>();
  state.ledger.models_evaluated = ledger.at("models_evaluated").get<std::uint64_t>();
  for (const OrderedJson& entry : ledger.at("per_model_steps"))
    state.ledger.per_model_steps[entry.at(0).get<std::uint64_t>()] =
        entry.at(1).get<std::uint64_t>();

  const OrderedJson& counters = j.at("counters");
  state.next_model_id = counters.at("next_model_id").get<std::uint64_t>();
  state.children_produced = counters.at("children_produced").get<std::uint64_t>();
  state.models_since_last_hurdle =
      counters.at("models_since_last_hurdle").get<std::uint64_t>();
  state.event_count = counters.at("event_count").get<std::uint64_t>();
  state.mutation_switch_applied = counters.at("mutation_switch_applied").get<bool>();
  state.consecutive_failures = counters.at("consecutive_failures").get<int>();
  state.aborted = counters.at("aborted").get<bool>();

  std::istringstream rng_stream(j.at("rng_state").get<std::string>());
  rng_stream >> state.rng;

  for (const OrderedJson& item : j.at("evaluated"))
    state.evaluated.push_back(individual_from_json(item));
  return checkpoint;
}

}  // namespace evonas
