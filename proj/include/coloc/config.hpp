#pragma once

#include <string>

#include <json.hpp>

#include "coloc/montecarlo.hpp"

namespace coloc {

/// JSON (de)serialization of the run/sweep configuration. Parsing is
/// strict: unknown keys are rejected with the offending path in the
/// message, and parse(render(c)) == c.
///
/// Document shape:
///   { "scenario": { ... }, "sweep": { ... } }
/// Both sections are optional; missing keys take the defaults.

nlohmann::json to_json(const PathSpec& spec);
nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const SweepConfig& config);

PathSpec path_from_json(const nlohmann::json& j, const std::string& where);
ScenarioConfig scenario_from_json(const nlohmann::json& j);
SweepConfig sweep_from_json(const nlohmann::json& j);

struct ConfigFile {
  ScenarioConfig scenario;
  SweepConfig sweep;
};

ConfigFile config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConfigFile& config);

/// Loads and strictly parses a config file. Throws std::runtime_error
/// with a line/field diagnostic on malformed input.
ConfigFile load_config_file(const std::string& path);

/// Applies a dotted-path override ("scenario.epochs=500") onto a config
/// document. Throws std::invalid_argument for paths or values that do
/// not parse.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// FNV-1a hash of the canonical JSON rendering of the sweep config.
std::string sweep_config_hash(const SweepConfig& config);

/// Reproducibility manifest written next to sweep outputs: seed, run
/// count, config hash, code version, and the full resolved config.
nlohmann::json sweep_manifest(const SweepConfig& config, int workers);

}  // namespace coloc
