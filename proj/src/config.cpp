#include "evonas/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "evonas/config_json.hpp"

namespace evonas {

using OrderedJson = nlohmann::ordered_json;

namespace {

template <typename T>
T get_or(const OrderedJson& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

OrderedJson model_config_to_json(const ModelConfig& config) {
  OrderedJson j;
  j["input_embedding_dim"] = config.input_embedding_dim;
  j["vocab_size"] = config.vocab_size;
  j["min_params"] = config.min_params;
  j["max_params"] = config.max_params;
  j["sequence_length"] = config.sequence_length;
  return j;
}

ModelConfig model_config_from_json(const OrderedJson& j) {
  ModelConfig config;
  config.input_embedding_dim = get_or(j, "input_embedding_dim", config.input_embedding_dim);
  config.vocab_size = get_or(j, "vocab_size", config.vocab_size);
  config.min_params = get_or(j, "min_params", config.min_params);
  config.max_params = get_or(j, "max_params", config.max_params);
  config.sequence_length = get_or(j, "sequence_length", config.sequence_length);
  if (config.min_params >= config.max_params)
    throw ConfigError("model.min_params must be < model.max_params");
  if (config.input_embedding_dim < 1 || config.vocab_size < 1 ||
      config.sequence_length < 1)
    throw ConfigError("model dimensions must be positive");
  return config;
}

OrderedJson validation_config_to_json(const ValidationConfig& config) {
  OrderedJson j;
  j["model"] = model_config_to_json(config.model);
  j["allow_none_normalization"] = config.space.allow_none_normalization;
  j["max_resample_attempts"] = config.max_resample_attempts;
  return j;
}

ValidationConfig validation_config_from_json(const OrderedJson& j) {
  ValidationConfig config;
  if (j.contains("model")) config.model = model_config_from_json(j.at("model"));
  config.space.allow_none_normalization =
      get_or(j, "allow_none_normalization", false);
  config.max_resample_attempts =
      get_or(j, "max_resample_attempts", config.max_resample_attempts);
  return config;
}

OrderedJson search_config_to_json(const SearchConfig& config) {
  OrderedJson j;
  j["seed_mode"] =
      config.seed_mode == SeedMode::kTransformerSeed ? "transformer" : "random";
  j["population_capacity"] = config.population_capacity;
  j["parent_subpop_size"] = config.parent_subpop_size;
  j["kill_subpop_size"] = config.kill_subpop_size;
  j["mutation_rate"] = config.mutation_rate;
  if (config.mutation_switch) {
    OrderedJson sw;
    sw["at_child_models"] = config.mutation_switch->at_child_models;
    sw["new_rate"] = config.mutation_switch->new_rate;
    sw["readd_none_normalization"] = config.mutation_switch->readd_none_normalization;
    j["mutation_switch"] = sw;
  }
  OrderedJson mode;
  if (config.fitness_mode.kind == FitnessModeKind::kPdh) {
    mode["kind"] = "pdh";
    mode["step_increments"] = config.fitness_mode.step_increments;
    mode["models_per_hurdle"] = config.fitness_mode.models_per_hurdle;
  } else {
    mode["kind"] = "fixed_steps";
    mode["fixed_steps"] = config.fitness_mode.fixed_steps;
  }
  j["fitness_mode"] = mode;
  if (config.total_model_budget) j["total_model_budget"] = *config.total_model_budget;
  if (config.total_step_budget) j["total_step_budget"] = *config.total_step_budget;
  j["worker_count"] = config.worker_count;
  j["rng_seed"] = config.rng_seed;
  j["count_init_toward_hurdle"] = config.count_init_toward_hurdle;
  j["max_consecutive_failures"] = config.max_consecutive_failures;
  j["validation"] = validation_config_to_json(config.validation);
  return j;
}

SearchConfig search_config_from_json(const OrderedJson& j) {
  SearchConfig config;
  const std::string seed_mode = get_or<std::string>(j, "seed_mode", "transformer");
  if (seed_mode == "transformer")
    config.seed_mode = SeedMode::kTransformerSeed;
  else if (seed_mode == "random")
    config.seed_mode = SeedMode::kRandom;
  else
    throw ConfigError("seed_mode must be 'transformer' or 'random'");
  config.population_capacity = get_or(j, "population_capacity", config.population_capacity);
  config.parent_subpop_size = get_or(j, "parent_subpop_size", config.parent_subpop_size);
  config.kill_subpop_size = get_or(j, "kill_subpop_size", config.kill_subpop_size);
  config.mutation_rate = get_or(j, "mutation_rate", config.mutation_rate);
  if (j.contains("mutation_switch") && !j.at("mutation_switch").is_null()) {
    const OrderedJson& sw = j.at("mutation_switch");
    MutationSwitch ms;
    ms.at_child_models = sw.at("at_child_models").get<std::uint64_t>();
    ms.new_rate = sw.at("new_rate").get<double>();
    ms.readd_none_normalization = get_or(sw, "readd_none_normalization", true);
    config.mutation_switch = ms;
  }
  if (j.contains("fitness_mode")) {
    const OrderedJson& mode = j.at("fitness_mode");
    const std::string kind = get_or<std::string>(mode, "kind", "pdh");
    if (kind == "pdh") {
      config.fitness_mode.kind = FitnessModeKind::kPdh;
      if (mode.contains("step_increments"))
        config.fitness_mode.step_increments =
            mode.at("step_increments").get<std::vector<std::uint64_t>>();
      config.fitness_mode.models_per_hurdle =
          get_or(mode, "models_per_hurdle", config.fitness_mode.models_per_hurdle);
    } else if (kind == "fixed_steps") {
      config.fitness_mode.kind = FitnessModeKind::kFixedSteps;
      config.fitness_mode.fixed_steps =
          get_or(mode, "fixed_steps", config.fitness_mode.fixed_steps);
    } else {
      throw ConfigError("fitness_mode.kind must be 'pdh' or 'fixed_steps'");
    }
  }
  if (j.contains("total_model_budget"))
    config.total_model_budget = j.at("total_model_budget").get<std::uint64_t>();
  if (j.contains("total_step_budget"))
    config.total_step_budget = j.at("total_step_budget").get<std::uint64_t>();
  config.worker_count = get_or(j, "worker_count", config.worker_count);
  config.rng_seed = get_or(j, "rng_seed", config.rng_seed);
  config.count_init_toward_hurdle =
      get_or(j, "count_init_toward_hurdle", config.count_init_toward_hurdle);
  config.max_consecutive_failures =
      get_or(j, "max_consecutive_failures", config.max_consecutive_failures);
  if (j.contains("validation"))
    config.validation = validation_config_from_json(j.at("validation"));
  return config;
}

OrderedJson oracle_config_to_json(const OracleConfig& config) {
  OrderedJson j;
  j["base_asymptote"] = config.base_asymptote;
  j["start_fitness"] = config.start_fitness;
  j["start_jitter"] = config.start_jitter;
  j["asymptote_jitter"] = config.asymptote_jitter;
  j["rate_base"] = config.rate_base;
  j["rate_spread"] = config.rate_spread;
  j["rate_jitter"] = config.rate_jitter;
  j["noise_scale"] = config.noise_scale;
  j["monotone"] = config.monotone;
  OrderedJson weights;
  for (const auto& [name, weight] : config.feature_weights) weights[name] = weight;
  j["feature_weights"] = weights;
  OrderedJson rate_weights;
  for (const auto& [name, weight] : config.rate_feature_weights)
    rate_weights[name] = weight;
  j["rate_feature_weights"] = rate_weights;
  return j;
}

OracleConfig oracle_config_from_json(const OrderedJson& j) {
  OracleConfig config = default_oracle_config();
  config.base_asymptote = get_or(j, "base_asymptote", config.base_asymptote);
  config.start_fitness = get_or(j, "start_fitness", config.start_fitness);
  config.start_jitter = get_or(j, "start_jitter", config.start_jitter);
  config.asymptote_jitter = get_or(j, "asymptote_jitter", config.asymptote_jitter);
  config.rate_base = get_or(j, "rate_base", config.rate_base);
  config.rate_spread = get_or(j, "rate_spread", config.rate_spread);
  config.rate_jitter = get_or(j, "rate_jitter", config.rate_jitter);
  config.noise_scale = get_or(j, "noise_scale", config.noise_scale);
  config.monotone = get_or(j, "monotone", config.monotone);
  auto read_weights = [&j](const std::string& key,
                           std::vector<std::pair<std::string, double>>& out) {
    if (!j.contains(key)) return;
    out.clear();
    for (const auto& [name, weight] : j.at(key).items()) {
      const auto& known = known_feature_names();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError("unknown oracle feature '" + name + "'");
      out.emplace_back(name, weight.get<double>());
    }
  };
  read_weights("feature_weights", config.feature_weights);
  read_weights("rate_feature_weights", config.rate_feature_weights);
  return config;
}

OrderedJson experiment_to_json(const ExperimentConfig& config) {
  OrderedJson j;
  j["name"] = config.name;
  j["search"] = search_config_to_json(config.search);
  OrderedJson oracle = oracle_config_to_json(config.oracle);
  oracle["seed"] = config.oracle_seed;
  j["oracle"] = oracle;
  OrderedJson ablation;
  ablation["replications"] = config.ablation.replications;
  ablation["fixed_step_arms"] = config.ablation.fixed_step_arms;
  j["ablation"] = ablation;
  j["output_dir"] = config.output_dir;
  return j;
}

ExperimentConfig experiment_from_json(const OrderedJson& j) {
  ExperimentConfig config;
  config.name = get_or<std::string>(j, "name", "custom");
  if (j.contains("search")) config.search = search_config_from_json(j.at("search"));
  if (j.contains("oracle")) {
    config.oracle = oracle_config_from_json(j.at("oracle"));
    config.oracle_seed = get_or<std::uint64_t>(j.at("oracle"), "seed", 1);
  }
  if (j.contains("ablation")) {
    const OrderedJson& ab = j.at("ablation");
    config.ablation.replications =
        get_or(ab, "replications", config.ablation.replications);
    if (ab.contains("fixed_step_arms"))
      config.ablation.fixed_step_arms =
          ab.at("fixed_step_arms").get<std::vector<std::uint64_t>>();
  }
  config.output_dir = get_or<std::string>(j, "output_dir", config.output_dir);
  return config;
}

namespace {

ModelConfig desk_model_config() {
  ModelConfig model;
  model.input_embedding_dim = 64;
  model.vocab_size = 1024;
  model.min_params = 250'000;
  model.max_params = 2'500'000;
  model.sequence_length = 16;
  return model;
}

ModelConfig paper_model_config() {
  ModelConfig model;  // defaults carry the published base setup
  return model;
}

ExperimentConfig desk_preset() {
  ExperimentConfig config;
  config.name = "desk";
  config.search.seed_mode = SeedMode::kTransformerSeed;
  config.search.population_capacity = 20;
  config.search.parent_subpop_size = 7;
  config.search.kill_subpop_size = 7;
  config.search.mutation_rate = 0.025;
  config.search.fitness_mode.kind = FitnessModeKind::kPdh;
  config.search.fitness_mode.step_increments = {10, 10, 10};
  config.search.fitness_mode.models_per_hurdle = 50;
  config.search.total_model_budget = 150;  // length(s) rounds of m models
  config.search.rng_seed = 77;
  config.search.count_init_toward_hurdle = false;
  config.search.validation.model = desk_model_config();
  config.search.validation.max_resample_attempts = 2'000'000;
  config.oracle = default_oracle_config();
  config.oracle.rate_base = 3.2 / 10.0;  // calibrated to s_0 = 10
  config.oracle_seed = 77;
  config.ablation.replications = 20;
  config.ablation.fixed_step_arms = {5, 10, 30, 100};
  return config;
}

ExperimentConfig schedule_51(bool desk_steps) {
  ExperimentConfig config = desk_preset();
  config.name = desk_steps ? "desk-5.1" : "paper-5.1";
  const std::uint64_t unit = desk_steps ? 1 : 1000;
  config.search.population_capacity = 100;
  config.search.parent_subpop_size = 30;
  config.search.kill_subpop_size = 30;
  config.search.fitness_mode.step_increments.assign(6, 30 * unit);
  config.search.fitness_mode.models_per_hurdle = 1000;
  config.search.total_model_budget = 6000;
  config.search.validation.model = desk_steps ? desk_model_config() : paper_model_config();
  config.oracle.rate_base = 3.2 / (30.0 * static_cast<double>(unit));
  config.ablation.fixed_step_arms = {15 * unit, 30 * unit, 180 * unit, 300 * unit};
  return config;
}

ExperimentConfig schedule_52(bool desk_steps) {
  ExperimentConfig config = schedule_51(desk_steps);
  config.name = desk_steps ? "desk-5.2" : "paper-5.2";
  const std::uint64_t unit = desk_steps ? 1 : 1000;
  config.search.fitness_mode.step_increments = {60 * unit, 60 * unit, 120 * unit};
  config.search.fitness_mode.models_per_hurdle = 5000;
  config.search.total_model_budget = 15000;
  config.search.mutation_switch =
      MutationSwitch{11000, 0.01, /*readd_none_normalization=*/true};
  config.oracle.rate_base = 3.2 / (60.0 * static_cast<double>(unit));
  return config;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"desk", "desk-5.1", "desk-5.2",
                                                 "paper-5.1", "paper-5.2"};
  return names;
}

ExperimentConfig make_preset(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "desk-5.1") return schedule_51(true);
  if (name == "desk-5.2") return schedule_52(true);
  if (name == "paper-5.1") return schedule_51(false);
  if (name == "paper-5.2") return schedule_52(false);
  throw ConfigError("unknown preset '" + name + "'");
}

std::string experiment_to_json_text(const ExperimentConfig& config) {
  return experiment_to_json(config).dump(2) + "\n";
}

ExperimentConfig experiment_from_json_text(const std::string& text) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return experiment_from_json(j);
}

ExperimentConfig load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return experiment_from_json_text(buffer.str());
}

void save_experiment_file(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file '" + path + "'");
  out << experiment_to_json_text(config);
}

}  // namespace evonas
