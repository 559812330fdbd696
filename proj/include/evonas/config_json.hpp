#pragma once

#include "json.hpp"

#include "evonas/config.hpp"

namespace evonas {

// JSON (de)serialization shared by config files and checkpoints.

nlohmann::ordered_json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json validation_config_to_json(const ValidationConfig& config);
ValidationConfig validation_config_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json search_config_to_json(const SearchConfig& config);
SearchConfig search_config_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json oracle_config_to_json(const OracleConfig& config);
OracleConfig oracle_config_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const nlohmann::ordered_json& j);

}  // namespace evonas
