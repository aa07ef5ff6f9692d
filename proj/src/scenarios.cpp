#include "complab/scenarios.hpp"

#include <cmath>

#include "complab/errors.hpp"
#include "complab/law.hpp"

namespace complab {

using nlohmann::json;

json ScenarioConfig::echo() const {
    return {{"scenario", scenario}, {"seed", seed},       {"paths", n_paths},
            {"steps", n_steps},     {"horizon", horizon}, {"params", params}};
}

namespace {

ScenarioConfig make_defaults(std::string id, std::size_t paths, std::size_t steps, double horizon, json params) {
    ScenarioConfig c;
    c.scenario = std::move(id);
    c.n_paths = paths;
    c.n_steps = steps;
    c.horizon = horizon;
    c.params = std::move(params);
    c.params["z_threshold"] = 4.0;
    return c;
}

std::vector<ScenarioInfo> build_catalog() {
    std::vector<ScenarioInfo> out;
    out.push_back({"dellacherie",
                   "Dellacherie compensator of a law, minimal-filtration martingale test, Poisson sub-case",
                   make_defaults("dellacherie", 100000, 300, 3.0,
                                 {{"law", Law::exponential(1.0).to_json()},
                                  {"poisson_rate", 1.0},
                                  {"ek_bad_factor", 0.4},
                                  {"control_min_z", 10.0}}),
                   run_dellacherie});
    out.push_back({"counterexample",
                   "Time-changed Poisson through Brownian local time: singular compensator, continuous law",
                   make_defaults("counterexample", 20000, 16384, 1.0,
                                 {{"mean_local_time_rel_tol", 0.02},
                                  {"law_sup_tol", 0.02},
                                  {"mass_min", 0.95},
                                  {"lebesgue_max", 0.2},
                                  {"ek_s", 0.5},
                                  {"ek_h", 0.01},
                                  {"ek_bin", 0.05},
                                  {"ek_K", json::array({1.0, 2.0, 4.0})}}),
                   run_counterexample});
    out.push_back({"shrinkage",
                   "Two-state hidden intensity projected onto the filtration of t ^ R",
                   make_defaults("shrinkage", 100000, 100, 2.0,
                                 {{"lambda_low", 1.0},
                                  {"lambda_high", 3.0},
                                  {"p_high", 0.5},
                                  {"bins", 5},
                                  {"check_times", json::array({0.1, 0.5, 1.0})}}),
                   run_shrinkage});
    out.push_back({"poisson-tilt",
                   "Girsanov transform of the first-jump compensator under a Poisson intensity tilt",
                   make_defaults("poisson-tilt", 100000, 200, 2.0,
                                 {{"lambda", 1.0}, {"mu", 2.0}, {"slope_rel_tol", 0.02}}),
                   run_poisson_tilt});
    out.push_back({"azema",
                   "Last zero of Brownian motion before 1: Azema supermartingale, A^L, Jeulin-Yor compensator",
                   make_defaults("azema", 100000, 8192, 1.0,
                                 {{"z_bins", 10},
                                  {"z_tol", 0.02},
                                  {"ks_tol", 0.01},
                                  {"terminal_tol", 0.03},
                                  {"mass_min", 0.95},
                                  {"jy_floor", 1e-6},
                                  {"path_stride", 16}}),
                   run_azema});
    return out;
}

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

template <typename T>
T read_field(const json& v, const char* key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: '") + key + "' has the wrong type");
    }
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog = build_catalog();
    return catalog;
}

const ScenarioInfo* find_scenario(std::string_view id) {
    for (const auto& info : scenario_catalog()) {
        if (info.id == id) return &info;
    }
    return nullptr;
}

ScenarioConfig default_config(std::string_view id) {
    const ScenarioInfo* info = find_scenario(id);
    if (!info) {
        throw ConfigError("unknown scenario '" + std::string(id) + "'");
    }
    return info->defaults;
}

void set_param(ScenarioConfig& config, const std::string& key, const json& value) {
    const ScenarioConfig defaults = default_config(config.scenario);
    const auto it = defaults.params.find(key);
    if (it == defaults.params.end()) {
        throw ConfigError("config: unknown parameter '" + key + "' for scenario " + config.scenario);
    }
    if (!same_kind(*it, value)) {
        throw ConfigError("config: parameter '" + key + "' has the wrong type");
    }
    config.params[key] = value;
}

void apply_config_json(ScenarioConfig& config, const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    if (!doc.contains("schema") || doc.at("schema") != 1) {
        throw ConfigError("config: \"schema\": 1 is required");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "schema") {
            continue;
        } else if (key == "scenario") {
            const auto id = read_field<std::string>(value, "scenario");
            if (!config.scenario.empty() && id != config.scenario) {
                throw ConfigError("config: file is for scenario '" + id + "', not '" + config.scenario + "'");
            }
        } else if (key == "seed") {
            config.seed = read_field<std::uint64_t>(value, "seed");
        } else if (key == "paths") {
            config.n_paths = read_field<std::size_t>(value, "paths");
        } else if (key == "steps") {
            config.n_steps = read_field<std::size_t>(value, "steps");
        } else if (key == "horizon") {
            config.horizon = read_field<double>(value, "horizon");
        } else if (key == "threads") {
            config.threads = read_field<unsigned>(value, "threads");
        } else if (key == "params") {
            if (!value.is_object()) {
                throw ConfigError("config: 'params' must be an object");
            }
            for (const auto& [pkey, pvalue] : value.items()) {
                set_param(config, pkey, pvalue);
            }
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
    const ScenarioInfo* info = find_scenario(config.scenario);
    if (!info) {
        throw ConfigError("unknown scenario '" + config.scenario + "'");
    }
    if (config.n_paths < 1000) {
        throw ConfigError("config: paths must be at least 1000");
    }
    if (config.n_steps < 2) {
        throw ConfigError("config: steps must be at least 2");
    }
    if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
        throw ConfigError("config: horizon must be positive");
    }
    if (config.threads == 0) {
        throw ConfigError("config: threads must be positive");
    }
    return info->run(config);
}

}  // namespace complab
