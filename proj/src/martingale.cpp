#include "complab/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "complab/errors.hpp"
#include "complab/parallel.hpp"

namespace complab {

std::vector<TimePair> pair_grid(const std::vector<double>& starts, const std::vector<double>& ends) {
    std::vector<TimePair> out;
    for (double s : starts) {
        for (double t : ends) {
            if (s < t) out.emplace_back(s, t);
        }
    }
    return out;
}

std::vector<double> pair_times(const std::vector<TimePair>& pairs) {
    std::set<double> times;
    for (const auto& [s, t] : pairs) {
        times.insert(s);
        times.insert(t);
    }
    return {times.begin(), times.end()};
}

SamplePath compensated_indicator(const StoppingSample& R, const IncreasingPath& A) {
    const TimeGrid& grid = A.grid();
    std::vector<double> values(grid.n_points());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double jump = R.occurred_by(grid.time(i)) ? 1.0 : 0.0;
        values[i] = jump - A[i];
    }
    return SamplePath(grid, std::move(values));
}

IncreasingPath stop_at(const IncreasingPath& A, const StoppingSample& R) {
    if (R.censored) {
        return A;
    }
    return stop_at(A, R, A.at(R.value));
}

IncreasingPath stop_at(const IncreasingPath& A, const StoppingSample& R, double value_at_R) {
    if (R.censored) {
        return A;
    }
    const TimeGrid& grid = A.grid();
    std::vector<double> values = A.values();
    const std::size_t first = grid.ceil_index(R.value);
    for (std::size_t i = first; i < values.size(); ++i) {
        values[i] = value_at_R;
    }
    return IncreasingPath(grid, std::move(values));
}

IncreasingPath quadratic_variation_discrete(const SamplePath& M) {
    std::vector<double> values(M.size(), 0.0);
    for (std::size_t i = 0; i + 1 < M.size(); ++i) {
        const double d = M[i + 1] - M[i];
        values[i + 1] = values[i] + d * d;
    }
    return IncreasingPath(M.grid, std::move(values));
}

double z_score(double estimate, double std_error) {
    if (std_error > 0.0) {
        return estimate / std_error;
    }
    if (estimate == 0.0) {
        return 0.0;
    }
    return estimate > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

void MartingaleReport::reevaluate() {
    overall_pass = true;
    for (auto& row : rows) {
        row.z = z_score(row.estimate, row.std_error);
        row.pass = std::abs(row.z) <= z_threshold;
        overall_pass = overall_pass && row.pass;
    }
}

double MartingaleReport::max_abs_z(const std::string& functional) const {
    double out = 0.0;
    for (const auto& row : rows) {
        if (row.functional == functional) out = std::max(out, std::abs(row.z));
    }
    return out;
}

namespace {

struct MeanAndError {
    double mean;
    double std_error;
};

// sequential two-pass reduction in path order
MeanAndError summarize(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double var = x.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace

MartingaleReport test_orthogonality(const PathBundle& M, const Observations& obs, const FiltrationView& view,
                                    const std::vector<TestFunctional>& functionals,
                                    const std::vector<TimePair>& pairs, const OrthogonalityOptions& options) {
    const std::size_t n = M.n_paths();
    if (n < options.min_paths) {
        throw InsufficientPaths("test_orthogonality: " + std::to_string(n) + " paths, need " +
                                std::to_string(options.min_paths));
    }
    if (obs.n_paths() != n) {
        throw std::invalid_argument("test_orthogonality: observations and bundle disagree on path count");
    }
    for (const auto& fn : functionals) {
        if (fn.kind() != TestFunctional::Kind::ConstantOne) {
            (void)view.observable(fn.observable());  // admissibility check up front
        }
    }
    MartingaleReport report;
    report.name = options.name;
    report.view = view.name;
    report.n_paths = n;
    report.z_threshold = options.z_threshold;

    std::vector<double> products(n);
    for (const auto& [s, t] : pairs) {
        if (!(s < t)) {
            throw std::invalid_argument("test_orthogonality: pairs need s < t");
        }
        const std::size_t cs = M.column_of(s);
        const std::size_t ct = M.column_of(t);
        for (const auto& fn : functionals) {
            parallel_for(n, options.threads, [&](std::size_t p) {
                const double h = fn.evaluate(view, obs.at(p, s));
                products[p] = h * (M.at(p, ct) - M.at(p, cs));
            });
            const auto [mean, se] = summarize(products);
            MartingaleRow row;
            row.s = s;
            row.t = t;
            row.functional = fn.id();
            row.estimate = mean;
            row.std_error = se;
            report.rows.push_back(row);
        }
    }
    report.reevaluate();
    return report;
}

void EthierKurtzReport::reevaluate() {
    overall_pass = true;
    for (auto& row : rows) {
        row.pass = row.estimate <= row.bound + 3.0 * row.std_error;
        overall_pass = overall_pass && row.pass;
    }
}

EthierKurtzReport check_ethier_kurtz(const PathBundle& A, const Observations& obs, const FiltrationView& view,
                                     const std::string& observable, const BinSpec& bins, double K,
                                     const std::vector<TimePair>& pairs, const std::string& name) {
    if (!(K >= 0.0)) {
        throw std::invalid_argument("check_ethier_kurtz: K must be nonnegative");
    }
    const std::size_t n = A.n_paths();
    const Observable& x_of = view.observable(observable);
    EthierKurtzReport report;
    report.name = name;
    report.observable = observable;
    report.K = K;
    report.n_paths = n;

    for (const auto& [s, t] : pairs) {
        if (!(s < t)) {
            throw std::invalid_argument("check_ethier_kurtz: pairs need s < t");
        }
        const std::size_t cs = A.column_of(s);
        const std::size_t ct = A.column_of(t);
        std::vector<double> x(n);
        for (std::size_t p = 0; p < n; ++p) {
            x[p] = x_of(obs.at(p, s));
        }
        const Binning binning = bins.fixed ? *bins.fixed : Binning::equal_probability(x, bins.quantile_bins);
        std::vector<std::vector<double>> members(binning.size());
        for (std::size_t p = 0; p < n; ++p) {
            members[binning.bin_of(x[p])].push_back(A.at(p, ct) - A.at(p, cs));
        }
        for (std::size_t b = 0; b < members.size(); ++b) {
            if (members[b].empty()) {
                report.empty_bins.emplace_back(s, b);
                continue;
            }
            const auto [mean, se] = summarize(members[b]);
            EthierKurtzRow row;
            row.s = s;
            row.t = t;
            row.bin = b;
            row.bin_lo = binning.lower(b);
            row.bin_hi = binning.upper(b);
            row.count = members[b].size();
            row.estimate = mean;
            row.std_error = se;
            row.bound = K * (t - s);
            report.rows.push_back(row);
        }
    }
    report.reevaluate();
    return report;
}

}  // namespace complab
