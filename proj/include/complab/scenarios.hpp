#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "complab/report.hpp"
#include "json.hpp"

namespace complab {

struct ScenarioConfig {
    std::string scenario;
    std::uint64_t seed = 20240917;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double horizon = 1.0;
    unsigned threads = 1;  // never changes results, so it stays out of the echo
    nlohmann::json params = nlohmann::json::object();

    /// Everything that determines the results.
    nlohmann::json echo() const;
};

struct ScenarioInfo {
    std::string id;
    std::string summary;
    ScenarioConfig defaults;
    std::function<ScenarioReport(const ScenarioConfig&)> run;
};

const std::vector<ScenarioInfo>& scenario_catalog();

/// nullptr for unknown ids.
const ScenarioInfo* find_scenario(std::string_view id);

/// Defaults of a scenario; ConfigError for unknown ids.
ScenarioConfig default_config(std::string_view id);

/// Overlays a config document {"schema": 1, "scenario", "seed", "paths",
/// "steps", "horizon", "threads", "params": {...}}. Unknown keys, unknown
/// params and type mismatches throw ConfigError.
void apply_config_json(ScenarioConfig& config, const nlohmann::json& doc);

/// Sets one scenario parameter; the key must exist in the defaults.
void set_param(ScenarioConfig& config, const std::string& key, const nlohmann::json& value);

/// Checks the config (ConfigError) and runs the scenario.
ScenarioReport run_scenario(const ScenarioConfig& config);

ScenarioReport run_dellacherie(const ScenarioConfig& config);
ScenarioReport run_counterexample(const ScenarioConfig& config);
ScenarioReport run_shrinkage(const ScenarioConfig& config);
ScenarioReport run_poisson_tilt(const ScenarioConfig& config);
ScenarioReport run_azema(const ScenarioConfig& config);

}  // namespace complab
