#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace complab {

/// Uniform time axis t_i = i * step(), i = 0..n_steps, on [0, horizon].
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_points() const { return n_steps_ + 1; }
    double step() const { return horizon_ / static_cast<double>(n_steps_); }

    /// Grid time of index i; time(n_steps()) is exactly horizon().
    double time(std::size_t i) const;

    /// Index of an exact grid time (relative tolerance 1e-9 of a step).
    /// Throws std::invalid_argument when t is not on the grid.
    std::size_t index_of(double t) const;

    /// Nearest grid index to t, clamped to [0, n_steps].
    std::size_t nearest_index(double t) const;

    /// Largest i with time(i) <= t, clamped to [0, n_steps].
    std::size_t floor_index(double t) const;

    /// First grid index k with time(k) >= t (n_points() if t > horizon).
    std::size_t ceil_index(double t) const;

    /// Same horizon/step restricted to the first n_steps steps.
    TimeGrid truncated(std::size_t n_steps) const;

    /// Every `factor`-th point of this grid (n_steps must divide evenly).
    TimeGrid coarsened(std::size_t factor) const;

    bool operator==(const TimeGrid& other) const = default;

private:
    double horizon_;
    std::size_t n_steps_;
};

/// Real-valued path sampled on a TimeGrid.
struct SamplePath {
    SamplePath(TimeGrid grid, std::vector<double> values);

    /// Zero path on the grid.
    explicit SamplePath(TimeGrid grid);

    TimeGrid grid;
    std::vector<double> values;

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    double back() const { return values.back(); }

    /// Every `factor`-th value, on grid.coarsened(factor).
    SamplePath subsampled(std::size_t factor) const;
    /// First n_steps + 1 values, on grid.truncated(n_steps).
    SamplePath truncated(std::size_t n_steps) const;
};

/// Nondecreasing path with value 0 at time 0.
class IncreasingPath {
public:
    /// Validates values[0] == 0 and values[i+1] >= values[i].
    IncreasingPath(TimeGrid grid, std::vector<double> values);

    /// Zero path.
    explicit IncreasingPath(TimeGrid grid);

    /// Path from nonnegative per-step increments (size n_steps).
    static IncreasingPath from_increments(TimeGrid grid, std::span<const double> increments);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    double back() const { return values_.back(); }
    double increment(std::size_t i) const { return values_[i + 1] - values_[i]; }

    /// Linear interpolation between grid points; constant beyond horizon.
    double at(double t) const;

    SamplePath as_sample_path() const { return SamplePath(grid_, values_); }

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Strictly increasing jump times in (0, horizon].
class JumpTimes {
public:
    explicit JumpTimes(double horizon);
    JumpTimes(std::vector<double> times, double horizon);

    const std::vector<double>& times() const { return times_; }
    double horizon() const { return horizon_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

private:
    std::vector<double> times_;
    double horizon_;
};

/// Realized random time; censored samples carry value = +infinity.
struct StoppingSample {
    double value = std::numeric_limits<double>::infinity();
    bool censored = true;

    static StoppingSample at(double t);
    static StoppingSample never() { return {}; }

    bool occurred_by(double t) const { return !censored && value <= t; }
    double stopped(double t) const { return censored ? t : (value < t ? value : t); }
};

}  // namespace complab
