#include "complab/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace complab {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
    }
    if (n_steps < 2) {
        throw std::invalid_argument("TimeGrid: n_steps must be at least 2");
    }
}

double TimeGrid::time(std::size_t i) const {
    if (i >= n_steps_) {
        return i == n_steps_ ? horizon_ : static_cast<double>(i) * step();
    }
    return static_cast<double>(i) * step();
}

std::size_t TimeGrid::index_of(double t) const {
    const double pos = t / step();
    const double rounded = std::round(pos);
    if (rounded < 0.0 || rounded > static_cast<double>(n_steps_) || std::abs(pos - rounded) > 1e-9) {
        throw std::invalid_argument("TimeGrid: time " + std::to_string(t) + " is not a grid point");
    }
    return static_cast<std::size_t>(rounded);
}

std::size_t TimeGrid::nearest_index(double t) const {
    const double pos = std::round(t / step());
    if (pos <= 0.0) {
        return 0;
    }
    return std::min(n_steps_, static_cast<std::size_t>(pos));
}

std::size_t TimeGrid::floor_index(double t) const {
    if (t <= 0.0) {
        return 0;
    }
    if (t >= horizon_) {
        return n_steps_;
    }
    auto i = static_cast<std::size_t>(std::floor(t / step()));
    i = std::min(i, n_steps_);
    // guard against rounding in t / step
    while (i > 0 && time(i) > t) {
        --i;
    }
    while (i < n_steps_ && time(i + 1) <= t) {
        ++i;
    }
    return i;
}

std::size_t TimeGrid::ceil_index(double t) const {
    if (t > horizon_) {
        return n_points();
    }
    std::size_t i = floor_index(t);
    if (time(i) < t) {
        ++i;
    }
    return i;
}

TimeGrid TimeGrid::truncated(std::size_t n_steps) const {
    if (n_steps > n_steps_) {
        throw std::invalid_argument("TimeGrid::truncated: more steps than the grid has");
    }
    return TimeGrid(static_cast<double>(n_steps) * step(), n_steps);
}

TimeGrid TimeGrid::coarsened(std::size_t factor) const {
    if (factor == 0 || n_steps_ % factor != 0) {
        throw std::invalid_argument("TimeGrid::coarsened: factor must divide n_steps");
    }
    return TimeGrid(horizon_, n_steps_ / factor);
}

SamplePath::SamplePath(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_points()) {
        throw std::invalid_argument("SamplePath: values must have n_steps + 1 entries");
    }
}

SamplePath::SamplePath(TimeGrid g) : grid(g), values(g.n_points(), 0.0) {}

SamplePath SamplePath::subsampled(std::size_t factor) const {
    TimeGrid coarse = grid.coarsened(factor);
    std::vector<double> out(coarse.n_points());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = values[i * factor];
    }
    return SamplePath(coarse, std::move(out));
}

SamplePath SamplePath::truncated(std::size_t n_steps) const {
    TimeGrid shorter = grid.truncated(n_steps);
    return SamplePath(shorter, std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n_steps + 1)));
}

IncreasingPath::IncreasingPath(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_points()) {
        throw std::invalid_argument("IncreasingPath: values must have n_steps + 1 entries");
    }
    if (values_[0] != 0.0) {
        throw std::invalid_argument("IncreasingPath: value at time 0 must be 0");
    }
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        if (!(values_[i + 1] >= values_[i])) {
            throw std::invalid_argument("IncreasingPath: path decreases at index " + std::to_string(i));
        }
    }
}

IncreasingPath::IncreasingPath(TimeGrid grid) : grid_(grid), values_(grid.n_points(), 0.0) {}

IncreasingPath IncreasingPath::from_increments(TimeGrid grid, std::span<const double> increments) {
    if (increments.size() != grid.n_steps()) {
        throw std::invalid_argument("IncreasingPath::from_increments: need n_steps increments");
    }
    std::vector<double> values(grid.n_points(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        if (!(increments[i] >= 0.0)) {
            throw std::invalid_argument("IncreasingPath::from_increments: negative increment");
        }
        acc += increments[i];
        values[i + 1] = acc;
    }
    return IncreasingPath(grid, std::move(values));
}

double IncreasingPath::at(double t) const {
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= grid_.horizon()) {
        return values_.back();
    }
    const std::size_t i = grid_.floor_index(t);
    const double left = grid_.time(i);
    if (left == t || i == grid_.n_steps()) {
        return values_[i];
    }
    const double w = (t - left) / (grid_.time(i + 1) - left);
    return values_[i] + w * (values_[i + 1] - values_[i]);
}

JumpTimes::JumpTimes(double horizon) : horizon_(horizon) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("JumpTimes: horizon must be positive");
    }
}

JumpTimes::JumpTimes(std::vector<double> times, double horizon) : times_(std::move(times)), horizon_(horizon) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("JumpTimes: horizon must be positive");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!(times_[i] > 0.0) || times_[i] > horizon_) {
            throw std::invalid_argument("JumpTimes: times must lie in (0, horizon]");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw std::invalid_argument("JumpTimes: times must be strictly increasing");
        }
    }
}

StoppingSample StoppingSample::at(double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("StoppingSample: value must be nonnegative");
    }
    if (std::isinf(t)) {
        return never();
    }
    return StoppingSample{t, false};
}

}  // namespace complab
