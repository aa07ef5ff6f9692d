#pragma once

// Shared pieces of the scenario implementations.

#include <cmath>
#include <string>
#include <vector>

#include "complab/errors.hpp"
#include "complab/martingale.hpp"
#include "complab/observation.hpp"
#include "complab/report.hpp"
#include "complab/scenarios.hpp"
#include "complab/time_grid.hpp"

namespace complab::detail {

inline double snap(const TimeGrid& grid, double t) {
    return grid.time(grid.nearest_index(t));
}

/// Pairs from fractions of the horizon, snapped to the grid.
inline std::vector<TimePair> snapped_pairs(const TimeGrid& grid, const std::vector<double>& start_fractions,
                                           const std::vector<double>& end_fractions) {
    std::vector<double> starts;
    std::vector<double> ends;
    for (double f : start_fractions) starts.push_back(snap(grid, f * grid.horizon()));
    for (double f : end_fractions) ends.push_back(snap(grid, f * grid.horizon()));
    return pair_grid(starts, ends);
}

inline double param(const ScenarioConfig& config, const char* key) {
    const auto it = config.params.find(key);
    if (it == config.params.end() || !it->is_number()) {
        throw ConfigError(config.scenario + ": parameter '" + key + "' must be a number");
    }
    return it->get<double>();
}

inline std::vector<double> param_list(const ScenarioConfig& config, const char* key) {
    const auto it = config.params.find(key);
    if (it == config.params.end() || !it->is_array()) {
        throw ConfigError(config.scenario + ": parameter '" + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : *it) {
        if (!v.is_number()) {
            throw ConfigError(config.scenario + ": parameter '" + key + "' must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/// Sequential two-pass mean and standard error.
inline MeanSe mean_se(const std::vector<double>& x) {
    if (x.empty()) return {};
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

/// Eight bounded functionals of sigma(s ^ tau) for the minimal view of `name`.
inline std::vector<TestFunctional> minimal_functionals(double horizon) {
    return {
        TestFunctional::constant_one(),
        TestFunctional::bin_indicator("occurred", 0.5, 1.5),
        TestFunctional::bin_indicator("stopped_fraction", 0.0, 1.0 / 3.0),
        TestFunctional::bin_indicator("stopped_fraction", 1.0 / 3.0, 2.0 / 3.0),
        TestFunctional::bin_indicator("stopped_fraction", 2.0 / 3.0, 1.0),
        TestFunctional::bin_indicator("stopped_fraction", 1.0, 2.0),
        TestFunctional::clipped_polynomial("stopped", {0.0, 1.0 / horizon}, 1.0),
        TestFunctional::clipped_polynomial("stopped_fraction", {0.0, -1.0, 1.0}, 1.0),
    };
}

inline OrthogonalityOptions orthogonality_options(const ScenarioConfig& config, std::string name) {
    OrthogonalityOptions options;
    options.threads = config.threads;
    options.name = std::move(name);
    options.z_threshold = param(config, "z_threshold");
    return options;
}

inline ScenarioReport start_report(const ScenarioConfig& config) {
    ScenarioReport report;
    report.scenario = config.scenario;
    report.config = config.echo();
    return report;
}

}  // namespace complab::detail
