#pragma once

#include <string>

#include <json.hpp>

#include "lets/harness.hpp"

namespace lets {

// Config files are JSON or a flat TOML subset (key = value lines, [section]
// tables, strings, numbers, booleans and nested arrays). Text starting with
// '{' parses as JSON, anything else as TOML; both normalize to one JSON shape.
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::string& path);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

// A sweep file is either a bare array of experiment configs or an object with
// an "experiments" array; entries may share defaults via a "base" object.
std::vector<ExperimentConfig> sweep_configs_from_json(const nlohmann::json& j);

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

std::string config_hash(const nlohmann::json& canonical_config);

std::string report_json(const ExperimentReport& report);

} // namespace lets
