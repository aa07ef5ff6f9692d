#include "complab/filtration_ops.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "complab/errors.hpp"
#include "complab/sim_core.hpp"

namespace complab {

double ProjectionResult::projected(std::size_t path, std::size_t column) const {
    const std::size_t bin = bin_index[path * table.size() + column];
    return table[column].bins[bin].mean;
}

std::vector<double> ProjectionResult::projected_path(std::size_t path) const {
    std::vector<double> out(table.size());
    for (std::size_t j = 0; j < table.size(); ++j) {
        out[j] = projected(path, j);
    }
    return out;
}

double ProjectionResult::weighted_mean(std::size_t column) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& b : table[column].bins) {
        sum += b.mean * static_cast<double>(b.count);
        n += b.count;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

ProjectionResult optional_projection_estimate(const PathBundle& lambda, const Observations& obs,
                                              const FiltrationView& coarse, const std::string& observable,
                                              std::size_t n_bins, const std::optional<Binning>& fixed_bins) {
    const std::size_t n = lambda.n_paths();
    if (obs.n_paths() != n) {
        throw std::invalid_argument("optional_projection_estimate: observations and bundle disagree on path count");
    }
    const Observable& x_of = coarse.observable(observable);
    const std::size_t m = lambda.n_times();

    ProjectionResult out;
    out.n_paths = n;
    out.table.resize(m);
    out.bin_index.assign(n * m, 0);

    std::vector<double> x(n);
    for (std::size_t j = 0; j < m; ++j) {
        const double s = lambda.times()[j];
        for (std::size_t p = 0; p < n; ++p) {
            x[p] = x_of(obs.at(p, s));
        }
        Binning binning = fixed_bins ? *fixed_bins : Binning::equal_probability(x, n_bins);
        if (binning.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw std::invalid_argument("optional_projection_estimate: too many bins");
        }
        std::vector<double> sum(binning.size(), 0.0);
        std::vector<double> sum_sq(binning.size(), 0.0);
        std::vector<std::size_t> count(binning.size(), 0);
        for (std::size_t p = 0; p < n; ++p) {
            const double v = lambda.at(p, j);
            if (!(v >= 0.0)) {
                throw std::invalid_argument("optional_projection_estimate: intensity must be nonnegative");
            }
            const std::size_t b = binning.bin_of(x[p]);
            out.bin_index[p * m + j] = static_cast<std::uint16_t>(b);
            sum[b] += v;
            count[b] += 1;
        }
        auto& entry = out.table[j];
        entry.s = s;
        entry.bins.resize(binning.size());
        for (std::size_t b = 0; b < binning.size(); ++b) {
            auto& stats = entry.bins[b];
            stats.lower = binning.lower(b);
            stats.upper = binning.upper(b);
            stats.count = count[b];
            if (count[b] == 0) {
                out.empty_bins.emplace_back(s, b);
                continue;
            }
            stats.mean = sum[b] / static_cast<double>(count[b]);
        }
        // second pass for the spread, kept in path order
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t b = out.bin_index[p * m + j];
            const double d = lambda.at(p, j) - entry.bins[b].mean;
            sum_sq[b] += d * d;
        }
        for (std::size_t b = 0; b < binning.size(); ++b) {
            const double c = static_cast<double>(count[b]);
            if (count[b] > 1) {
                entry.bins[b].std_error = std::sqrt(sum_sq[b] / (c - 1.0) / c);
            }
        }
        entry.binning = std::move(binning);
    }
    return out;
}

double integrate_intensity(const std::vector<double>& times, const std::vector<double>& values, double upto) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("integrate_intensity: size mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        const double a = times[j];
        const double b = times[j + 1];
        if (upto <= a) break;
        if (b < upto) {
            acc += 0.5 * (values[j] + values[j + 1]) * (b - a);
        } else {
            acc += values[j] * (upto - a);
            break;
        }
    }
    return acc;
}

DensityMartingale::DensityMartingale(SamplePath z, double floor) : z_(std::move(z)), floor_(floor) {
    if (!(floor_ > 0.0)) {
        throw std::invalid_argument("DensityMartingale: floor must be positive");
    }
    if (std::abs(z_[0] - 1.0) > 1e-12) {
        throw std::invalid_argument("DensityMartingale: Z_0 must be 1");
    }
    for (double v : z_.values) {
        if (!(v >= floor_)) {
            throw std::invalid_argument("DensityMartingale: Z fell below its floor");
        }
    }
}

void BracketRegistry::register_bracket(std::string name, PredictableBracket bracket) {
    brackets_.insert_or_assign(std::move(name), std::move(bracket));
}

const PredictableBracket& BracketRegistry::find(const std::string& name) const {
    const auto it = brackets_.find(name);
    if (it == brackets_.end()) {
        throw BracketUnavailable("no closed-form bracket registered under '" + name + "'");
    }
    return it->second;
}

SamplePath poisson_tilt_density(const TimeGrid& grid, double lambda, double mu, const StoppingSample& R) {
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw std::invalid_argument("poisson_tilt_density: rates must be positive");
    }
    const double log_ratio = std::log(mu / lambda);
    std::vector<double> z(grid.n_points());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double t = grid.time(i);
        const double jumped = R.occurred_by(t) ? log_ratio : 0.0;
        z[i] = std::exp(jumped - (mu - lambda) * R.stopped(t));
    }
    z[0] = 1.0;
    return SamplePath(grid, std::move(z));
}

PredictableBracket poisson_tilt_bracket(double lambda, double mu) {
    return [lambda, mu](const DensityMartingale& Z, const StoppingSample& R) {
        const TimeGrid& grid = Z.path().grid;
        std::vector<double> values(grid.n_points(), 0.0);
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double a = grid.time(i);
            const double b = grid.time(i + 1);
            const double alive = std::max(0.0, std::min(b, R.value) - a);
            values[i + 1] = values[i] + Z[i] * (mu - lambda) * alive;
        }
        return SamplePath(grid, std::move(values));
    };
}

IncreasingPath girsanov_compensator(const IncreasingPath& base, const DensityMartingale& Z, const StoppingSample& R,
                                    const BracketRegistry& registry, const std::string& bracket_name) {
    const PredictableBracket& bracket = registry.find(bracket_name);
    if (!(Z.path().grid == base.grid())) {
        throw std::invalid_argument("girsanov_compensator: Z and base compensator live on different grids");
    }
    const SamplePath zm = bracket(Z, R);
    if (zm.size() != base.size()) {
        throw std::invalid_argument("girsanov_compensator: bracket has the wrong length");
    }
    std::vector<double> values(base.size());
    double correction = 0.0;
    values[0] = base[0];
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double d = zm[i + 1] - zm[i];
        if (d != 0.0) {
            correction += d / std::max(Z[i], Z.floor());
        }
        values[i + 1] = base[i + 1] + correction;
    }
    return IncreasingPath(base.grid(), std::move(values));
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double azema_supermartingale(double b, double t) {
    if (!(t < 1.0)) {
        throw HorizonViolation("azema_supermartingale: t must be below 1");
    }
    return std::erfc(std::abs(b) / std::sqrt(2.0 * (1.0 - t)));
}

SamplePath azema_path(const SamplePath& B) {
    std::vector<double> z(B.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = azema_supermartingale(B[i], B.grid.time(i));
    }
    return SamplePath(B.grid, std::move(z));
}

StoppingSample last_zero_before_one(const SamplePath& B) {
    const TimeGrid& grid = B.grid;
    if (grid.horizon() < 1.0 - 1e-9 * grid.step()) {
        throw HorizonViolation("last_zero_before_one: the path must reach time 1");
    }
    const std::size_t last = grid.floor_index(1.0 + 1e-9 * grid.step());
    for (std::size_t i = last; i >= 1; --i) {
        if (B[i] == 0.0 || (B[i - 1] < 0.0) != (B[i] < 0.0)) {
            // exact zero at t_i, or a sign change inside the step ending at t_i
            if (B[i] == 0.0 || B[i - 1] != 0.0) {
                return StoppingSample::at(grid.time(i));
            }
        }
    }
    return StoppingSample::at(0.0);
}

StoppingSample last_zero_before_one(const SamplePath& B, RandomStream& bridge) {
    const TimeGrid& grid = B.grid;
    if (grid.horizon() < 1.0 - 1e-9 * grid.step()) {
        throw HorizonViolation("last_zero_before_one: the path must reach time 1");
    }
    const std::size_t last = grid.floor_index(1.0 + 1e-9 * grid.step());
    for (std::size_t i = last; i >= 1; --i) {
        const double a = B[i - 1];
        const double b = B[i];
        if (b == 0.0) {
            return StoppingSample::at(grid.time(i));
        }
        // B starts at 0, so the first step always holds a zero
        const bool hit = a == 0.0 || a * b < 0.0 || bridge.uniform() < std::exp(-2.0 * a * b / grid.step());
        if (hit) {
            return StoppingSample::at(grid.time(i - 1) + bridge.uniform() * grid.step());
        }
    }
    return StoppingSample::at(0.0);
}

IncreasingPath honest_compensator_AL(const IncreasingPath& L0) {
    const TimeGrid& grid = L0.grid();
    if (grid.horizon() > 1.0 - grid.step() + 1e-12) {
        throw HorizonViolation("honest_compensator_AL: grid must stop at 1 - step");
    }
    std::vector<double> values(L0.size(), 0.0);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double dl = L0.increment(i);
        double d = 0.0;
        if (dl > 0.0) {
            d = std::sqrt(2.0 / (std::numbers::pi * (1.0 - grid.time(i)))) * dl;
        }
        values[i + 1] = values[i] + d;
    }
    return IncreasingPath(grid, std::move(values));
}

JeulinYorResult jeulin_yor_compensator(const std::function<double(std::size_t)>& z_at, const IncreasingPath& AL,
                                       const StoppingSample& L, double floor) {
    if (!(floor > 0.0)) {
        throw std::invalid_argument("jeulin_yor_compensator: floor must be positive");
    }
    const TimeGrid& grid = AL.grid();
    std::vector<double> values(AL.size(), 0.0);
    JeulinYorResult out{IncreasingPath(grid), 0.0, 0};
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double da = AL.increment(i);
        double d = 0.0;
        if (da > 0.0 && !L.censored && grid.time(i + 1) <= L.value) {
            const double z = z_at(i);
            if (z < floor) {
                out.clipped_mass += da;
                out.clipped_steps += 1;
            }
            d = da / std::max(z, floor);
        }
        values[i + 1] = values[i] + d;
    }
    out.compensator = IncreasingPath(grid, std::move(values));
    return out;
}

JeulinYorResult jeulin_yor_compensator(const SamplePath& Z, const IncreasingPath& AL, const StoppingSample& L,
                                       double floor) {
    if (!(Z.grid == AL.grid())) {
        throw std::invalid_argument("jeulin_yor_compensator: Z and A^L live on different grids");
    }
    return jeulin_yor_compensator([&Z](std::size_t i) { return Z[i]; }, AL, L, floor);
}

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string HonestTimeBundle::to_csv(std::size_t stride) const {
    if (stride == 0) {
        throw std::invalid_argument("HonestTimeBundle::to_csv: stride must be positive");
    }
    std::string out = "t,B,L0,Z,AL\n";
    const TimeGrid& grid = B.grid;
    for (std::size_t i = 0; i < B.size(); i += stride) {
        append_number(out, grid.time(i));
        out += ',';
        append_number(out, B[i]);
        out += ',';
        append_number(out, L0[i]);
        out += ',';
        append_number(out, Z[i]);
        out += ',';
        append_number(out, AL[i]);
        out += '\n';
    }
    return out;
}

HonestTimeBundle make_honest_time_bundle(const SamplePath& B_full, double epsilon) {
    const StoppingSample L = last_zero_before_one(B_full);
    SamplePath working = B_full.truncated(B_full.grid.n_steps() - 1);
    IncreasingPath L0 = local_time_zero(working, epsilon);
    SamplePath Z = azema_path(working);
    IncreasingPath AL = honest_compensator_AL(L0);
    return HonestTimeBundle{std::move(working), std::move(L0), L, std::move(Z), std::move(AL)};
}

}  // namespace complab
