#include "complab/compensator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "complab/errors.hpp"
#include "complab/quadrature.hpp"

namespace complab {

namespace {

[[noreturn]] void degenerate(double u) {
    throw DegenerateLaw("1 - F(u-) < 1e-12 reached at u = " + std::to_string(u));
}

// int over the open segment (x, y) containing no atoms or density kinks
double continuous_segment(const Law& law, double x, double y) {
    const double mass = law.continuous_cdf(y) - law.continuous_cdf(x);
    if (!(mass > 0.0)) {
        return 0.0;
    }
    if (1.0 - law.cdf_left(y) < kDegenerateCap) {
        degenerate(y);
    }
    const double x_inner = std::nextafter(x, y);
    const double y_inner = std::nextafter(y, x);
    auto integrand = [&](double u) {
        // one-sided limits at the segment ends: F(x+) includes an atom at x,
        // F(y-) excludes one at y; density is read from inside the segment
        const double fu = (u <= x) ? law.cdf(x) : law.cdf_left(u);
        const double du = law.density(std::clamp(u, x_inner, y_inner));
        return du / (1.0 - fu);
    };
    return adaptive_simpson(integrand, x, y, kQuadratureRelTol);
}

}  // namespace

double dellacherie_increment(const Law& law, double a, double b) {
    if (!(b > a)) {
        return 0.0;
    }
    std::vector<double> cuts{a};
    for (const auto& atom : law.atoms()) {
        if (atom.time > a && atom.time < b) cuts.push_back(atom.time);
    }
    for (double x : law.breakpoints(a, b)) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x = cuts[i];
        const double y = cuts[i + 1];
        total += continuous_segment(law, x, y);
        const double jump = law.atom_mass_at(y);
        if (jump > 0.0) {
            const double survival = 1.0 - law.cdf_left(y);
            if (survival < kDegenerateCap) {
                degenerate(y);
            }
            total += jump / survival;
        }
    }
    return total;
}

double dellacherie_compensator(const Law& law, double t, double r) {
    const double upper = std::min(t, r);
    if (!(upper > 0.0)) {
        return 0.0;
    }
    return dellacherie_increment(law, 0.0, upper);
}

IncreasingPath compensator_on_grid(const Law& law, const TimeGrid& grid) {
    std::vector<double> values(grid.n_points(), 0.0);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        values[i + 1] = values[i] + dellacherie_increment(law, grid.time(i), grid.time(i + 1));
    }
    return IncreasingPath(grid, std::move(values));
}

double log_survival_compensator(const Law& law, double t, double r) {
    if (law.has_atoms()) {
        throw std::invalid_argument("log_survival_compensator: law must be atom-free");
    }
    const double upper = std::min(t, r);
    if (!(upper > 0.0)) {
        return 0.0;
    }
    const double f = law.cdf(upper);
    if (1.0 - f < kDegenerateCap) {
        degenerate(upper);
    }
    return -std::log1p(-f);
}

double hazard_rate(const std::function<double(double)>& density, const Law& law, double t) {
    if (law.has_atoms()) {
        throw std::invalid_argument("hazard_rate: law must be atom-free");
    }
    const double survival = 1.0 - law.cdf(t);
    if (survival < kDegenerateCap) {
        degenerate(t);
    }
    return density(t) / survival;
}

double hazard_rate(const Law& law, double t) {
    return hazard_rate([&law](double u) { return law.density(u); }, law, t);
}

double EmpiricalLaw::kernel_density(double x) const {
    if (uncensored.empty() || !(bandwidth > 0.0)) {
        return 0.0;
    }
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    const double h = bandwidth;
    // only samples within 8 bandwidths contribute noticeably
    auto lo = std::lower_bound(uncensored.begin(), uncensored.end(), x - 8.0 * h);
    auto hi = std::upper_bound(uncensored.begin(), uncensored.end(), x + 8.0 * h);
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) {
        const double z = (x - *it) / h;
        sum += std::exp(-0.5 * z * z);
    }
    return sum * inv_sqrt_2pi / (h * static_cast<double>(n_total));
}

double EmpiricalLaw::ecdf(double u) const {
    const auto k = std::upper_bound(uncensored.begin(), uncensored.end(), u) - uncensored.begin();
    return static_cast<double>(k) / static_cast<double>(n_total);
}

double EmpiricalLaw::ecdf_left(double u) const {
    const auto k = std::lower_bound(uncensored.begin(), uncensored.end(), u) - uncensored.begin();
    return static_cast<double>(k) / static_cast<double>(n_total);
}

double silverman_bandwidth(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(n - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double w = pos - static_cast<double>(i);
        return i + 1 < n ? (1.0 - w) * sorted[i] + w * sorted[i + 1] : sorted[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

EmpiricalLaw empirical_law(std::span<const StoppingSample> samples, const EmpiricalLawOptions& options) {
    EmpiricalLaw out{Law::atomic({}), samples.size(), 0, 0.0, {}};
    for (const auto& s : samples) {
        if (!s.censored) out.uncensored.push_back(s.value);
    }
    out.n_uncensored = out.uncensored.size();
    if (out.n_uncensored < options.min_uncensored) {
        throw InsufficientData("empirical_law: " + std::to_string(out.n_uncensored) +
                               " uncensored samples, need " + std::to_string(options.min_uncensored));
    }
    std::sort(out.uncensored.begin(), out.uncensored.end());
    const double n = static_cast<double>(out.n_total);
    const double atom_threshold = std::max(static_cast<double>(options.atom_min_count), options.atom_fraction * n);

    std::vector<Atom> atoms;
    std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
    std::size_t continuous_count = 0;
    const auto& v = out.uncensored;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;  // bit-equal run
        const std::size_t run = j - i;
        if (static_cast<double>(run) >= atom_threshold && v[i] > 0.0) {
            atoms.push_back({v[i], static_cast<double>(run) / n});
        } else {
            continuous_count += run;
            if (v[i] > 0.0) {
                knots.emplace_back(v[i], static_cast<double>(continuous_count) / n);
            } else {
                // samples at exactly 0 fold into the first knot
                knots.front().second = 0.0;
            }
        }
        i = j;
    }
    std::optional<ContinuousPart> cont;
    if (knots.size() >= 2) {
        cont = TablePart{std::move(knots)};
    }
    out.law = Law(std::move(cont), std::move(atoms));
    out.bandwidth = silverman_bandwidth(out.uncensored);
    return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) {
        throw InsufficientData("ks_distance: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size();) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        const double f = cdf(samples[i]);
        d = std::max({d, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(j) / n - f)});
        i = j;
    }
    return d;
}

SingularityReport mass_decomposition(const IncreasingPath& A, const std::vector<bool>& support_indicator,
                                     double epsilon) {
    const TimeGrid& grid = A.grid();
    if (support_indicator.size() != grid.n_points()) {
        throw std::invalid_argument("mass_decomposition: indicator length must match the grid");
    }
    double on = 0.0;
    double total = 0.0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < grid.n_steps(); ++i) {
        const double d = A.increment(i);
        total += d;
        if (support_indicator[i]) {
            on += d;
            ++inside;
        }
    }
    if (!(total > 0.0)) {
        throw ZeroMass("mass_decomposition: A is constant");
    }
    SingularityReport r;
    r.mass_on_set = std::clamp(on / total, 0.0, 1.0);
    r.lebesgue_of_set = grid.step() * static_cast<double>(inside);
    r.epsilon_used = epsilon;
    r.total_mass = total;
    r.horizon = grid.horizon();
    return r;
}

void SingularityTally::add(const SingularityReport& report) {
    mass_on_ += report.mass_on_set * report.total_mass;
    mass_total_ += report.total_mass;
    lebesgue_sum_ += report.lebesgue_of_set;
    horizon_ = report.horizon;
    epsilon_ = report.epsilon_used;
    ++count_;
}

SingularityReport SingularityTally::pooled() const {
    if (count_ == 0 || !(mass_total_ > 0.0)) {
        throw ZeroMass("SingularityTally: no mass recorded");
    }
    SingularityReport r;
    r.mass_on_set = std::clamp(mass_on_ / mass_total_, 0.0, 1.0);
    r.lebesgue_of_set = lebesgue_sum_ / static_cast<double>(count_);
    r.epsilon_used = epsilon_;
    r.total_mass = mass_total_ / static_cast<double>(count_);
    r.horizon = horizon_;
    return r;
}

}  // namespace complab
