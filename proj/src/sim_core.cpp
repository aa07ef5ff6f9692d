#include "complab/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace complab {

SamplePath simulate_bm(const TimeGrid& grid, RandomStream& stream) {
    const double sd = std::sqrt(grid.step());
    std::vector<double> values(grid.n_points());
    values[0] = 0.0;
    double b = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        b += sd * stream.normal();
        values[i] = b;
    }
    return SamplePath(grid, std::move(values));
}

double default_local_time_epsilon(const TimeGrid& grid) {
    return std::sqrt(grid.step());
}

IncreasingPath local_time_zero(const SamplePath& path, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("local_time_zero: epsilon must be positive");
    }
    const double unit = path.grid.step() / (2.0 * epsilon);
    std::vector<double> values(path.size());
    values[0] = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (std::abs(path[i]) <= epsilon) {
            ++hits;
        }
        // counting then scaling keeps the path exactly nondecreasing
        values[i + 1] = static_cast<double>(hits) * unit;
    }
    return IncreasingPath(path.grid, std::move(values));
}

StoppingSample inverse_clock(const IncreasingPath& clock, double level) {
    if (!(level >= 0.0)) {
        throw std::invalid_argument("inverse_clock: level must be nonnegative");
    }
    const auto& v = clock.values();
    // clock is nondecreasing: first index with value > level
    const auto it = std::upper_bound(v.begin(), v.end(), level);
    if (it == v.end()) {
        return StoppingSample::never();
    }
    return StoppingSample::at(clock.grid().time(static_cast<std::size_t>(it - v.begin())));
}

JumpTimes simulate_poisson(double rate, double horizon, RandomStream& stream) {
    if (!(rate >= 0.0)) {
        throw std::invalid_argument("simulate_poisson: rate must be nonnegative");
    }
    JumpTimes empty(horizon);
    if (rate == 0.0) {
        return empty;
    }
    std::vector<double> times;
    double t = 0.0;
    for (;;) {
        t += stream.exponential() / rate;
        if (t > horizon) {
            break;
        }
        if (!times.empty() && !(t > times.back())) {
            continue;  // exponential underflowed to 0; measure-zero tie
        }
        times.push_back(t);
    }
    return JumpTimes(std::move(times), horizon);
}

std::size_t count_at(const JumpTimes& jumps, double t) {
    const auto& times = jumps.times();
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

SamplePath time_change_counting(const JumpTimes& jumps, const IncreasingPath& clock) {
    std::vector<double> values(clock.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<double>(count_at(jumps, clock[i]));
    }
    return SamplePath(clock.grid(), std::move(values));
}

namespace {

// Level the clock must reach for the count to hit `threshold`, if any.
bool passage_level(const JumpTimes& jumps, std::size_t threshold, double& level) {
    if (threshold == 0) {
        throw std::invalid_argument("first_passage_timechanged: threshold must be >= 1");
    }
    if (jumps.size() < threshold) {
        return false;
    }
    level = jumps.times()[threshold - 1];
    return true;
}

}  // namespace

StoppingSample first_passage_timechanged(const JumpTimes& jumps, const IncreasingPath& clock,
                                         std::size_t threshold) {
    double level = 0.0;
    if (!passage_level(jumps, threshold, level)) {
        return StoppingSample::never();
    }
    const auto& v = clock.values();
    const auto it = std::lower_bound(v.begin(), v.end(), level);
    if (it == v.end()) {
        return StoppingSample::never();
    }
    return StoppingSample::at(clock.grid().time(static_cast<std::size_t>(it - v.begin())));
}

StoppingSample first_passage_interpolated(const JumpTimes& jumps, const IncreasingPath& clock,
                                          std::size_t threshold) {
    double level = 0.0;
    if (!passage_level(jumps, threshold, level)) {
        return StoppingSample::never();
    }
    const auto& v = clock.values();
    const auto it = std::lower_bound(v.begin(), v.end(), level);
    if (it == v.end()) {
        return StoppingSample::never();
    }
    const auto k = static_cast<std::size_t>(it - v.begin());
    const TimeGrid& grid = clock.grid();
    if (k == 0) {
        return StoppingSample::at(0.0);
    }
    const double lo = v[k - 1];
    const double hi = v[k];
    const double frac = (level - lo) / (hi - lo);  // hi > lo since v[k-1] < level <= v[k]
    const double t = grid.time(k - 1) + frac * (grid.time(k) - grid.time(k - 1));
    return StoppingSample::at(std::min(t, grid.time(k)));
}

}  // namespace complab
