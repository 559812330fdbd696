#include "doctest.h"

#include <cstdio>

#include "evonas/ablation.hpp"
#include "evonas/checkpoint.hpp"
#include "evonas/config.hpp"
#include "evonas/evolution.hpp"
#include "evonas/genome_io.hpp"

using namespace evonas;

TEST_CASE("presets resolve to checkable configurations") {
  for (const std::string& name : preset_names()) {
    const ExperimentConfig config = make_preset(name);
    CHECK(config.name == name);
    CHECK_NOTHROW(check_config(config.search));
  }
  CHECK_THROWS_AS(make_preset("nonsense"), ConfigError);

  const ExperimentConfig paper52 = make_preset("paper-5.2");
  CHECK(paper52.search.fitness_mode.step_increments ==
        std::vector<std::uint64_t>{60000, 60000, 120000});
  CHECK(paper52.search.fitness_mode.models_per_hurdle == 5000);
  REQUIRE(paper52.search.mutation_switch.has_value());
  CHECK(paper52.search.mutation_switch->at_child_models == 11000);
  CHECK(paper52.search.mutation_switch->new_rate == 0.01);
  CHECK(paper52.search.mutation_switch->readd_none_normalization);

  const ExperimentConfig paper51 = make_preset("paper-5.1");
  CHECK(paper51.search.population_capacity == 100);
  CHECK(paper51.search.parent_subpop_size == 30);
  CHECK(paper51.search.fitness_mode.step_increments ==
        std::vector<std::uint64_t>(6, 30000));
  CHECK(paper51.search.fitness_mode.models_per_hurdle == 1000);

  const ExperimentConfig desk = make_preset("desk");
  CHECK(desk.search.population_capacity == 20);
  CHECK(desk.search.parent_subpop_size == 7);
  CHECK(desk.search.fitness_mode.step_increments ==
        std::vector<std::uint64_t>{10, 10, 10});
  CHECK(desk.search.fitness_mode.models_per_hurdle == 50);
  CHECK(desk.ablation.replications == 20);
}

TEST_CASE("resolved configs round-trip byte-stably") {
  const ExperimentConfig config = make_preset("desk-5.2");
  const std::string text = experiment_to_json_text(config);
  const ExperimentConfig parsed = experiment_from_json_text(text);
  CHECK(experiment_to_json_text(parsed) == text);
  CHECK(parsed.search.mutation_switch->at_child_models == 11000);
  CHECK(parsed.oracle.rate_base == config.oracle.rate_base);
  CHECK(parsed.oracle.feature_weights == config.oracle.feature_weights);
}

TEST_CASE("unknown oracle features are rejected at parse time") {
  std::string text = experiment_to_json_text(make_preset("desk"));
  const std::string needle = "identity_residual_blocks";
  text.replace(text.find(needle), needle.size(), "identity_risidual_blocks");
  CHECK_THROWS_AS(experiment_from_json_text(text), ConfigError);
}

TEST_CASE("checkpoints capture and restore the whole search state") {
  ExperimentConfig config = make_preset("desk");
  config.search.total_model_budget = 25;
  config.search.rng_seed = 3;
  const SimulatedOracle oracle(config.oracle, 3);
  SearchResult result = run_search(config.search, oracle);

  const std::string path = "test_checkpoint_tmp.json";
  save_checkpoint(Checkpoint{result.state, config.oracle, 3, "desk"}, path);
  const Checkpoint loaded = load_checkpoint(path);
  std::remove(path.c_str());

  CHECK(loaded.oracle_seed == 3);
  CHECK(loaded.state.children_produced == 25);
  CHECK(loaded.state.next_model_id == result.state.next_model_id);
  CHECK(loaded.state.population.size() == result.state.population.size());
  for (std::size_t i = 0; i < loaded.state.population.size(); ++i) {
    CHECK(loaded.state.population.at(i).genome == result.state.population.at(i).genome);
    CHECK(loaded.state.population.at(i).fitness == result.state.population.at(i).fitness);
  }
  CHECK(loaded.state.schedule.hurdles == result.state.schedule.hurdles);
  CHECK(loaded.state.ledger.total_steps_consumed ==
        result.state.ledger.total_steps_consumed);
  CHECK(loaded.state.evaluated.size() == result.state.evaluated.size());
  // The RNG stream restores exactly.
  std::mt19937_64 original = result.state.rng;
  std::mt19937_64 restored = loaded.state.rng;
  for (int i = 0; i < 16; ++i) CHECK(original() == restored());
}

TEST_CASE("a resumed run continues the event stream identically") {
  ExperimentConfig config = make_preset("desk");
  config.search.rng_seed = 9;
  config.search.total_model_budget = 60;
  const SimulatedOracle oracle(config.oracle, config.oracle_seed);

  const SearchResult full = run_search(config.search, oracle);

  SearchConfig half_config = config.search;
  half_config.total_model_budget = 25;
  SearchResult half = run_search(half_config, oracle);
  half.state.config.total_model_budget = 60;
  const SearchResult rest = resume_search(std::move(half.state), oracle);

  REQUIRE(half.events.size() + rest.events.size() == full.events.size());
  for (std::size_t i = 0; i < half.events.size(); ++i)
    CHECK(event_to_json_line(half.events[i]) == event_to_json_line(full.events[i]));
  for (std::size_t i = 0; i < rest.events.size(); ++i)
    CHECK(event_to_json_line(rest.events[i]) ==
          event_to_json_line(full.events[half.events.size() + i]));
}

TEST_CASE("the ablation harness insists on a PDH baseline and replications") {
  ExperimentConfig config = make_preset("desk");
  config.ablation.replications = 1;
  CHECK_THROWS_AS(run_ablation(config, nullptr), ConfigError);
  config.ablation.replications = 2;
  config.search.fitness_mode.kind = FitnessModeKind::kFixedSteps;
  CHECK_THROWS_AS(run_ablation(config, nullptr), ConfigError);
}
