#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "complab/compensator.hpp"
#include "complab/parallel.hpp"
#include "complab/rng.hpp"
#include "complab/sim_core.hpp"
#include "scenario_util.hpp"

namespace complab {

namespace {

constexpr std::size_t kCheckpoints = 256;
constexpr std::size_t kCurvePoints = 64;

struct CounterPath {
    std::vector<double> L_cp;  // L at the checkpoints
    StoppingSample R;
    SingularityReport fine;
    SingularityReport coarse;
    bool fine_ok = false;
    bool coarse_ok = false;
};

std::vector<bool> near_zero(const SamplePath& B, double eps) {
    std::vector<bool> out(B.size());
    for (std::size_t i = 0; i < B.size(); ++i) out[i] = std::abs(B[i]) <= eps;
    return out;
}

// Where the stopped local time puts its mass, against {|B| <= eps}.
bool singularity(const IncreasingPath& L_stopped, const SamplePath& B, double eps, SingularityReport& out) {
    try {
        out = mass_decomposition(L_stopped, near_zero(B, eps), eps);
        return true;
    } catch (const ZeroMass&) {
        return false;
    }
}

FiltrationView brownian_view() {
    FiltrationView view = minimal_view("R");
    view.name = "brownian(B, L, t ^ R)";
    view.add("abs_B", [](const ObservedAt& at) { return at.channel("abs_B"); });
    view.add("local_time", [](const ObservedAt& at) { return at.channel("local_time"); });
    return view;
}

std::vector<TestFunctional> brownian_functionals() {
    const double inf = std::numeric_limits<double>::infinity();
    return {
        TestFunctional::constant_one(),
        TestFunctional::bin_indicator("abs_B", 0.0, 0.05),
        TestFunctional::bin_indicator("abs_B", 0.05, 0.2),
        TestFunctional::bin_indicator("abs_B", 0.2, 0.5),
        TestFunctional::bin_indicator("abs_B", 0.5, inf),
        TestFunctional::bin_indicator("occurred", 0.5, 1.5),
        TestFunctional::clipped_polynomial("local_time", {0.0, 1.0}, 2.0),
        TestFunctional::clipped_polynomial("abs_B", {0.0, 1.0}, 2.0),
    };
}

}  // namespace

ScenarioReport run_counterexample(const ScenarioConfig& config) {
    using detail::param;
    if (config.n_steps < 4096 || config.n_steps % 2 != 0) {
        throw ConfigError("counterexample: steps must be even and at least 4096");
    }
    ScenarioReport report = detail::start_report(config);
    const TimeGrid grid(config.horizon, config.n_steps);
    const double H = grid.horizon();
    const double eps = default_local_time_epsilon(grid);
    const std::size_t n = config.n_paths;
    const RngSpec rng{config.seed};

    const auto pairs = detail::snapped_pairs(grid, {0.125, 0.25, 0.5}, {0.625, 0.75, 1.0});
    const double ek_s = detail::snap(grid, param(config, "ek_s") * H);
    const double ek_t = detail::snap(grid, ek_s + param(config, "ek_h"));
    if (!(ek_t > ek_s) || ek_t > H) {
        throw ConfigError("counterexample: ek_s + ek_h must land on a later grid time within the horizon");
    }
    std::vector<double> times = pair_times(pairs);
    times.push_back(ek_s);
    times.push_back(ek_t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<std::size_t> cp_index(kCheckpoints);
    for (std::size_t k = 0; k < kCheckpoints; ++k) {
        cp_index[k] = grid.nearest_index(H * static_cast<double>(k + 1) / kCheckpoints);
    }

    std::vector<CounterPath> paths(n);
    PathBundle abs_B(times, n);
    PathBundle local_time(times, n);
    PathBundle L_stopped(times, n);
    parallel_for(n, config.threads, [&](std::size_t p) {
        RandomStream s0 = rng.stream(p, 0);
        const SamplePath B = simulate_bm(grid, s0);
        const IncreasingPath L = local_time_zero(B, eps);
        RandomStream s1 = rng.stream(p, 1);
        const JumpTimes jumps = simulate_poisson(1.0, L.back() + 1.0, s1);
        auto& d = paths[p];
        d.R = first_passage_interpolated(jumps, L, 1);
        const IncreasingPath Ls = stop_at(L, d.R);
        d.L_cp.resize(kCheckpoints);
        for (std::size_t k = 0; k < kCheckpoints; ++k) d.L_cp[k] = L[cp_index[k]];
        for (std::size_t j = 0; j < times.size(); ++j) {
            const std::size_t i = grid.index_of(times[j]);
            abs_B.at(p, j) = std::abs(B[i]);
            local_time.at(p, j) = L[i];
            L_stopped.at(p, j) = Ls[i];
        }
        d.fine_ok = singularity(Ls, B, eps, d.fine);
        const SamplePath Bc = B.subsampled(2);
        const double eps_c = default_local_time_epsilon(Bc.grid);
        const IncreasingPath Lc = local_time_zero(Bc, eps_c);
        d.coarse_ok = singularity(stop_at(Lc, first_passage_interpolated(jumps, Lc, 1)), Bc, eps_c, d.coarse);
    });

    // (a) mean local time against sqrt(2t/pi)
    {
        Table curve = make_curve("mean_local_time");
        std::vector<double> x(n);
        detail::MeanSe terminal;
        const std::size_t stride = kCheckpoints / kCurvePoints;
        for (std::size_t k = stride - 1; k < kCheckpoints; k += stride) {
            for (std::size_t p = 0; p < n; ++p) x[p] = paths[p].L_cp[k];
            const auto ms = detail::mean_se(x);
            const double t = grid.time(cp_index[k]);
            add_curve_point(curve, t, ms.mean, std::sqrt(2.0 * t / std::numbers::pi), ms.mean - 3.0 * ms.se,
                            ms.mean + 3.0 * ms.se);
            terminal = ms;
        }
        const double target = std::sqrt(2.0 * H / std::numbers::pi);
        report.add_metric(make_metric("mean_local_time_terminal", terminal.mean, target,
                                      param(config, "mean_local_time_rel_tol") * target, Comparison::Within,
                                      terminal.se));
        report.tables.push_back(std::move(curve));
    }

    // (b) where the big-filtration compensator L_{t ^ R} lives, at two resolutions
    {
        SingularityTally fine;
        SingularityTally coarse;
        for (const auto& d : paths) {
            if (d.fine_ok) fine.add(d.fine);
            if (d.coarse_ok) coarse.add(d.coarse);
        }
        const auto f = fine.pooled();
        const auto c = coarse.pooled();
        report.add_metric(make_metric("singularity_mass_on_set", f.mass_on_set, param(config, "mass_min"), 0.0,
                                      Comparison::AtLeast));
        report.add_metric(make_metric("singularity_mass_on_set_coarse", c.mass_on_set, param(config, "mass_min"), 0.0,
                                      Comparison::AtLeast));
        report.add_metric(make_metric("singularity_lebesgue_fraction", f.lebesgue_fraction(),
                                      param(config, "lebesgue_max"), 0.0, Comparison::AtMost));
        report.add_metric(make_metric("singularity_lebesgue_fraction_coarse", c.lebesgue_fraction(),
                                      param(config, "lebesgue_max"), 0.0, Comparison::AtMost));
        report.add_metric(make_metric("singularity_lebesgue_ratio_fine_over_coarse",
                                      f.lebesgue_fraction() / c.lebesgue_fraction(), 1.0, 0.0, Comparison::AtMost));
        report.notes.push_back(
            "the occupation estimator of local time is absolutely continuous at any fixed grid; singularity is "
            "shown as a shrinking Lebesgue fraction of the support set when the step is halved");
    }

    // (c) law of R against the construction identity P(R > t) = E exp(-L_t)
    {
        Table curve = make_curve("law_of_R");
        std::vector<double> diff(n);
        double worst = -1.0;
        double worst_se = 0.0;
        for (std::size_t k = 0; k < kCheckpoints; ++k) {
            const double t = grid.time(cp_index[k]);
            double hits = 0.0;
            double oracle = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                const double hit = paths[p].R.occurred_by(t) ? 1.0 : 0.0;
                const double q = 1.0 - std::exp(-paths[p].L_cp[k]);
                hits += hit;
                oracle += q;
                diff[p] = hit - q;
            }
            const double f_hat = hits / static_cast<double>(n);
            const double f_oracle = oracle / static_cast<double>(n);
            const auto d = detail::mean_se(diff);
            const double se_f = std::sqrt(f_hat * (1.0 - f_hat) / static_cast<double>(n));
            add_curve_point(curve, t, f_hat, f_oracle, f_hat - 3.0 * se_f, f_hat + 3.0 * se_f);
            if (std::abs(f_hat - f_oracle) > worst) {
                worst = std::abs(f_hat - f_oracle);
                worst_se = d.se;
            }
        }
        report.add_metric(make_metric("law_sup_distance", worst, param(config, "law_sup_tol"), 0.0,
                                      Comparison::AtMost, worst_se));
        report.tables.push_back(std::move(curve));
    }

    // (d) minimal-filtration compensator recovered from the empirical law
    Observations obs(n);
    {
        std::vector<StoppingSample> r(n);
        for (std::size_t p = 0; p < n; ++p) r[p] = paths[p].R;
        obs.add_random_time("R", std::move(r));
    }
    obs.add_channel("abs_B", std::move(abs_B));
    obs.add_channel("local_time", local_time);
    {
        std::vector<StoppingSample> samples(n);
        for (std::size_t p = 0; p < n; ++p) samples[p] = paths[p].R;
        const EmpiricalLaw emp = empirical_law(samples);
        report.add_metric(make_metric("empirical_law_atoms", static_cast<double>(emp.law.atoms().size()), 0.0, 0.0,
                                      Comparison::AtMost));

        PathBundle M_min(times, n);
        parallel_for(n, config.threads, [&](std::size_t p) {
            const StoppingSample& R = paths[p].R;
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double t = times[j];
                M_min.at(p, j) = (R.occurred_by(t) ? 1.0 : 0.0) - log_survival_compensator(emp.law, t, R.value);
            }
        });
        report.attach("minimal_view_recovered",
                      test_orthogonality(M_min, obs, minimal_view("R"), detail::minimal_functionals(H), pairs,
                                         detail::orthogonality_options(config, "minimal_view_recovered")),
                      true);
        report.attach("control_recovered_in_brownian_view",
                      test_orthogonality(M_min, obs, brownian_view(), brownian_functionals(), pairs,
                                         detail::orthogonality_options(config, "control_recovered_in_brownian_view")),
                      false);
    }

    // the big-filtration compensator L_{t ^ R} and the zero control
    {
        PathBundle M_big(times, n);
        PathBundle M_zero(times, n);
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double jump = paths[p].R.occurred_by(times[j]) ? 1.0 : 0.0;
                M_big.at(p, j) = jump - L_stopped.at(p, j);
                M_zero.at(p, j) = jump;
            }
        }
        report.attach("brownian_view_local_time",
                      test_orthogonality(M_big, obs, brownian_view(), brownian_functionals(), pairs,
                                         detail::orthogonality_options(config, "brownian_view_local_time")),
                      true);
        report.attach("control_zero_compensator",
                      test_orthogonality(M_zero, obs, brownian_view(), brownian_functionals(), pairs,
                                         detail::orthogonality_options(config, "control_zero_compensator")),
                      false);
    }

    // local time has no linear conditional-increment bound near zero
    {
        BinSpec bins;
        bins.fixed = Binning({0.0, param(config, "ek_bin")});
        const std::vector<TimePair> ek_pair{{ek_s, ek_t}};
        const double h = ek_t - ek_s;
        double largest_bound = 0.0;
        double near_zero_increment = 0.0;
        double near_zero_se = 0.0;
        for (double K : detail::param_list(config, "ek_K")) {
            const std::string name = "local_time_ek_K" + format_number(K);
            EthierKurtzReport ek = check_ethier_kurtz(local_time, obs, brownian_view(), "abs_B", bins, K, ek_pair, name);
            for (const auto& row : ek.rows) {
                if (row.bin == 0) {
                    near_zero_increment = row.estimate;
                    near_zero_se = row.std_error;
                }
            }
            largest_bound = std::max(largest_bound, K * h);
            report.attach(name, std::move(ek), false);
        }
        report.add_metric(make_metric("local_time_increment_near_zero", near_zero_increment, largest_bound, 0.0,
                                      Comparison::AtLeast, near_zero_se));
        report.notes.push_back("local-time increment over h = " + format_number(h) +
                               " from near zero scales like sqrt(h); sqrt(2h/pi) = " +
                               format_number(std::sqrt(2.0 * h / std::numbers::pi)) + " from exactly zero");
    }

    report.reevaluate();
    return report;
}

}  // namespace complab
