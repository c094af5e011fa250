#pragma once

// JSON form of PipelineConfig, shared by model manifests and CLI run configs.
// Parsing is strict: unknown keys and wrong types raise ConfigError.

#include <json.hpp>

#include "driftdet/detector.hpp"

namespace driftdet {

nlohmann::json to_json(const PipelineConfig& config);
/// Missing keys keep their defaults from `base`.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {});

/// Throws ConfigError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where);

}  // namespace driftdet
