#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "complab/time_grid.hpp"

namespace complab {

/// Values of one process for many paths at a fixed set of snapshot times
/// (row-major: path, then time).
class PathBundle {
public:
    PathBundle(std::vector<double> times, std::size_t n_paths);

    std::size_t n_paths() const { return n_paths_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t n_times() const { return times_.size(); }

    /// Column of snapshot time t (tolerance 1e-12 relative); throws if absent.
    std::size_t column_of(double t) const;
    bool has_time(double t) const;

    double at(std::size_t path, std::size_t column) const { return data_[path * times_.size() + column]; }
    double& at(std::size_t path, std::size_t column) { return data_[path * times_.size() + column]; }
    std::span<const double> row(std::size_t path) const;

    /// Copies path values at the snapshot times (which must be grid times).
    void set_row(std::size_t path, const SamplePath& values);
    void set_row(std::size_t path, const IncreasingPath& values);

    PathBundle operator+(const PathBundle& other) const;

private:
    std::vector<double> times_;
    std::size_t n_paths_;
    std::vector<double> data_;
};

class ObservedAt;

/// Per-path information from which filtration views draw their observables:
/// processes sampled at snapshot times, random times, and time-0 values.
class Observations {
public:
    explicit Observations(std::size_t n_paths);

    std::size_t n_paths() const { return n_paths_; }

    void add_channel(std::string name, PathBundle values);
    void add_random_time(std::string name, std::vector<StoppingSample> times);
    void add_initial(std::string name, std::vector<double> values);

    ObservedAt at(std::size_t path, double s) const;

private:
    friend class ObservedAt;
    std::size_t n_paths_;
    std::map<std::string, PathBundle, std::less<>> channels_;
    std::map<std::string, std::vector<StoppingSample>, std::less<>> random_times_;
    std::map<std::string, std::vector<double>, std::less<>> initial_;
};

/// What one path reveals at time s. Every accessor reads information up to
/// time s only, which is how observables stay adapted.
class ObservedAt {
public:
    ObservedAt(const Observations& obs, std::size_t path, double s) : obs_(&obs), path_(path), s_(s) {}

    double time() const { return s_; }
    std::size_t path() const { return path_; }

    /// Channel value at time s (s must be one of the channel's snapshot times).
    double channel(std::string_view name) const;
    /// s ^ tau.
    double stopped(std::string_view name) const;
    /// 1{tau <= s}.
    bool occurred(std::string_view name) const;
    /// tau on {tau <= s}, 0 otherwise.
    double value_if_occurred(std::string_view name) const;
    /// Time-0 information.
    double initial(std::string_view name) const;

private:
    const StoppingSample& random_time(std::string_view name) const;

    const Observations* obs_;
    std::size_t path_;
    double s_;
};

using Observable = std::function<double(const ObservedAt&)>;

/// Named set of admissible observables at time s.
struct FiltrationView {
    std::string name;
    std::map<std::string, Observable, std::less<>> observables;

    const Observable& observable(std::string_view key) const;
    FiltrationView& add(std::string key, Observable fn);
};

/// Minimal filtration sigma(t ^ tau): "one", "stopped" (s ^ tau),
/// "stopped_fraction" ((s ^ tau) / s), "occurred" (1{tau <= s}).
FiltrationView minimal_view(const std::string& time_name);

/// Bounded H_s used to probe martingale increments.
class TestFunctional {
public:
    enum class Kind { ConstantOne, BinIndicator, ClippedPolynomial };

    static TestFunctional constant_one();
    /// 1{lo <= x < hi} for the observable x.
    static TestFunctional bin_indicator(std::string observable, double lo, double hi);
    /// clamp(sum c_k x^k, -clip, clip).
    static TestFunctional clipped_polynomial(std::string observable, std::vector<double> coefficients, double clip);

    const std::string& id() const { return id_; }
    Kind kind() const { return kind_; }
    const std::string& observable() const { return observable_; }
    double bound() const { return bound_; }

    /// Throws std::logic_error if the output ever leaves [-bound, bound].
    double evaluate(const FiltrationView& view, const ObservedAt& at) const;

    TestFunctional& with_id(std::string id) {
        id_ = std::move(id);
        return *this;
    }

private:
    TestFunctional(Kind kind, std::string observable, std::vector<double> params, double bound, std::string id);

    Kind kind_;
    std::string observable_;
    std::vector<double> params_;
    double bound_;
    std::string id_;
};

}  // namespace complab
