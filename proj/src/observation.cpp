#include "complab/observation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace complab {

namespace {

bool same_time(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

std::string format_coefficient(double c) {
    std::ostringstream os;
    os << c;
    return os.str();
}

}  // namespace

PathBundle::PathBundle(std::vector<double> times, std::size_t n_paths)
    : times_(std::move(times)), n_paths_(n_paths), data_(times_.size() * n_paths, 0.0) {}

std::size_t PathBundle::column_of(double t) const {
    for (std::size_t j = 0; j < times_.size(); ++j) {
        if (same_time(times_[j], t)) return j;
    }
    throw std::invalid_argument("PathBundle: no snapshot at time " + std::to_string(t));
}

bool PathBundle::has_time(double t) const {
    return std::any_of(times_.begin(), times_.end(), [t](double x) { return same_time(x, t); });
}

std::span<const double> PathBundle::row(std::size_t path) const {
    return {data_.data() + path * times_.size(), times_.size()};
}

void PathBundle::set_row(std::size_t path, const SamplePath& values) {
    for (std::size_t j = 0; j < times_.size(); ++j) {
        at(path, j) = values[values.grid.index_of(times_[j])];
    }
}

void PathBundle::set_row(std::size_t path, const IncreasingPath& values) {
    for (std::size_t j = 0; j < times_.size(); ++j) {
        at(path, j) = values[values.grid().index_of(times_[j])];
    }
}

PathBundle PathBundle::operator+(const PathBundle& other) const {
    if (other.n_paths_ != n_paths_ || other.times_.size() != times_.size()) {
        throw std::invalid_argument("PathBundle: shape mismatch in sum");
    }
    PathBundle out(times_, n_paths_);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out.data_[i] = data_[i] + other.data_[i];
    }
    return out;
}

Observations::Observations(std::size_t n_paths) : n_paths_(n_paths) {}

void Observations::add_channel(std::string name, PathBundle values) {
    if (values.n_paths() != n_paths_) {
        throw std::invalid_argument("Observations: channel '" + name + "' has the wrong number of paths");
    }
    channels_.insert_or_assign(std::move(name), std::move(values));
}

void Observations::add_random_time(std::string name, std::vector<StoppingSample> times) {
    if (times.size() != n_paths_) {
        throw std::invalid_argument("Observations: random time '" + name + "' has the wrong number of paths");
    }
    random_times_.insert_or_assign(std::move(name), std::move(times));
}

void Observations::add_initial(std::string name, std::vector<double> values) {
    if (values.size() != n_paths_) {
        throw std::invalid_argument("Observations: initial value '" + name + "' has the wrong number of paths");
    }
    initial_.insert_or_assign(std::move(name), std::move(values));
}

ObservedAt Observations::at(std::size_t path, double s) const {
    if (path >= n_paths_) {
        throw std::out_of_range("Observations: path index out of range");
    }
    return ObservedAt(*this, path, s);
}

double ObservedAt::channel(std::string_view name) const {
    const auto it = obs_->channels_.find(name);
    if (it == obs_->channels_.end()) {
        throw std::invalid_argument("ObservedAt: unknown channel '" + std::string(name) + "'");
    }
    return it->second.at(path_, it->second.column_of(s_));
}

const StoppingSample& ObservedAt::random_time(std::string_view name) const {
    const auto it = obs_->random_times_.find(name);
    if (it == obs_->random_times_.end()) {
        throw std::invalid_argument("ObservedAt: unknown random time '" + std::string(name) + "'");
    }
    return it->second[path_];
}

double ObservedAt::stopped(std::string_view name) const {
    return random_time(name).stopped(s_);
}

bool ObservedAt::occurred(std::string_view name) const {
    return random_time(name).occurred_by(s_);
}

double ObservedAt::value_if_occurred(std::string_view name) const {
    const auto& tau = random_time(name);
    return tau.occurred_by(s_) ? tau.value : 0.0;
}

double ObservedAt::initial(std::string_view name) const {
    const auto it = obs_->initial_.find(name);
    if (it == obs_->initial_.end()) {
        throw std::invalid_argument("ObservedAt: unknown initial value '" + std::string(name) + "'");
    }
    return it->second[path_];
}

const Observable& FiltrationView::observable(std::string_view key) const {
    const auto it = observables.find(key);
    if (it == observables.end()) {
        throw std::invalid_argument("FiltrationView '" + name + "': observable '" + std::string(key) +
                                    "' is not admissible");
    }
    return it->second;
}

FiltrationView& FiltrationView::add(std::string key, Observable fn) {
    observables.insert_or_assign(std::move(key), std::move(fn));
    return *this;
}

FiltrationView minimal_view(const std::string& time_name) {
    FiltrationView view{"minimal(" + time_name + ")", {}};
    view.add("one", [](const ObservedAt&) { return 1.0; });
    view.add("stopped", [time_name](const ObservedAt& at) { return at.stopped(time_name); });
    view.add("stopped_fraction", [time_name](const ObservedAt& at) {
        return at.time() > 0.0 ? at.stopped(time_name) / at.time() : 1.0;
    });
    view.add("occurred", [time_name](const ObservedAt& at) { return at.occurred(time_name) ? 1.0 : 0.0; });
    return view;
}

TestFunctional::TestFunctional(Kind kind, std::string observable, std::vector<double> params, double bound,
                               std::string id)
    : kind_(kind), observable_(std::move(observable)), params_(std::move(params)), bound_(bound), id_(std::move(id)) {}

TestFunctional TestFunctional::constant_one() {
    return TestFunctional(Kind::ConstantOne, "", {}, 1.0, "one");
}

TestFunctional TestFunctional::bin_indicator(std::string observable, double lo, double hi) {
    if (!(hi > lo)) {
        throw std::invalid_argument("TestFunctional: bin needs lo < hi");
    }
    std::ostringstream id;
    id << "bin[" << observable << " in [" << lo << "," << hi << ")]";
    return TestFunctional(Kind::BinIndicator, std::move(observable), {lo, hi}, 1.0, id.str());
}

TestFunctional TestFunctional::clipped_polynomial(std::string observable, std::vector<double> coefficients,
                                                  double clip) {
    if (coefficients.empty() || !(clip > 0.0)) {
        throw std::invalid_argument("TestFunctional: polynomial needs coefficients and a positive clip");
    }
    std::string id = "poly[" + observable + ";";
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        id += (k ? "," : "") + format_coefficient(coefficients[k]);
    }
    id += ";clip=" + format_coefficient(clip) + "]";
    return TestFunctional(Kind::ClippedPolynomial, std::move(observable), std::move(coefficients), clip, id);
}

double TestFunctional::evaluate(const FiltrationView& view, const ObservedAt& at) const {
    double out = 0.0;
    switch (kind_) {
        case Kind::ConstantOne:
            out = 1.0;
            break;
        case Kind::BinIndicator: {
            const double x = view.observable(observable_)(at);
            out = (x >= params_[0] && x < params_[1]) ? 1.0 : 0.0;
            break;
        }
        case Kind::ClippedPolynomial: {
            const double x = view.observable(observable_)(at);
            double acc = 0.0;
            for (auto it = params_.rbegin(); it != params_.rend(); ++it) {
                acc = acc * x + *it;
            }
            out = std::isnan(acc) ? 0.0 : std::clamp(acc, -bound_, bound_);
            break;
        }
    }
    if (!(std::abs(out) <= bound_)) {
        throw std::logic_error("TestFunctional '" + id_ + "' left its declared bound");
    }
    return out;
}

}  // namespace complab
