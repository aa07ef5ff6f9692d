#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "complab/compensator.hpp"
#include "complab/filtration_ops.hpp"
#include "complab/parallel.hpp"
#include "complab/rng.hpp"
#include "complab/sim_core.hpp"
#include "scenario_util.hpp"

namespace complab {

namespace {

double arcsine_cdf(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(t));
}

struct AzemaPath {
    StoppingSample L;
    SingularityReport fine;
    SingularityReport coarse;
    double AL_terminal = 0.0;
    double clipped_mass = 0.0;
    std::size_t clipped_steps = 0;
};

std::vector<bool> near_zero(const SamplePath& B, double eps) {
    std::vector<bool> out(B.size());
    for (std::size_t i = 0; i < B.size(); ++i) out[i] = std::abs(B[i]) <= eps;
    return out;
}

// Local time and A^L on the working grid [0, 1 - step] of a path on [0, 1].
struct HonestPieces {
    SamplePath working;
    IncreasingPath L0;
    IncreasingPath AL;
    double eps;
};

HonestPieces honest_pieces(const SamplePath& B_full) {
    SamplePath working = B_full.truncated(B_full.grid.n_steps() - 1);
    const double eps = default_local_time_epsilon(B_full.grid);
    IncreasingPath L0 = local_time_zero(working, eps);
    IncreasingPath AL = honest_compensator_AL(L0);
    return {std::move(working), std::move(L0), std::move(AL), eps};
}

FiltrationView expanded_view() {
    FiltrationView view{"expanded(B, L0, 1{L <= s}, L 1{L <= s})", {}};
    view.add("one", [](const ObservedAt&) { return 1.0; });
    view.add("B", [](const ObservedAt& at) { return at.channel("B"); });
    view.add("abs_B", [](const ObservedAt& at) { return std::abs(at.channel("B")); });
    view.add("local_time", [](const ObservedAt& at) { return at.channel("local_time"); });
    view.add("azema", [](const ObservedAt& at) { return azema_supermartingale(at.channel("B"), at.time()); });
    view.add("honest_occurred", [](const ObservedAt& at) { return at.occurred("L") ? 1.0 : 0.0; });
    view.add("honest_value", [](const ObservedAt& at) { return at.value_if_occurred("L"); });
    return view;
}

std::vector<TestFunctional> expanded_functionals() {
    const double inf = std::numeric_limits<double>::infinity();
    return {
        TestFunctional::constant_one(),
        TestFunctional::bin_indicator("abs_B", 0.0, 0.25),
        TestFunctional::bin_indicator("abs_B", 0.25, 0.75),
        TestFunctional::bin_indicator("abs_B", 0.75, inf),
        TestFunctional::bin_indicator("honest_occurred", 0.5, 1.5),
        TestFunctional::clipped_polynomial("honest_value", {0.0, 1.0}, 1.0),
        TestFunctional::clipped_polynomial("azema", {0.0, 1.0}, 1.0),
        TestFunctional::clipped_polynomial("local_time", {0.0, 1.0}, 2.0),
    };
}

}  // namespace

ScenarioReport run_azema(const ScenarioConfig& config) {
    using detail::param;
    if (config.horizon != 1.0) {
        throw ConfigError("azema: horizon must be 1 (the working grid stops one step before)");
    }
    if (config.n_steps % 2 != 0 || config.n_steps < 64) {
        throw ConfigError("azema: steps must be even and at least 64");
    }
    const double z_bins_param = param(config, "z_bins");
    const double stride_param = param(config, "path_stride");
    if (!(z_bins_param >= 1.0) || z_bins_param != std::floor(z_bins_param) || !(stride_param >= 1.0) ||
        stride_param != std::floor(stride_param)) {
        throw ConfigError("azema: z_bins and path_stride must be positive integers");
    }
    const double floor = param(config, "jy_floor");
    ScenarioReport report = detail::start_report(config);
    const TimeGrid full(1.0, config.n_steps);
    const TimeGrid grid = full.truncated(config.n_steps - 1);
    const std::size_t n = config.n_paths;
    const RngSpec rng{config.seed};

    // pairs and check times are fractions of 1, snapped onto the working grid
    std::vector<double> starts;
    std::vector<double> ends;
    for (double f : {0.125, 0.25, 0.5}) starts.push_back(detail::snap(grid, f));
    for (double f : {0.625, 0.75, 0.875}) ends.push_back(detail::snap(grid, f));
    const auto pairs = pair_grid(starts, ends);
    std::vector<double> check_times;
    for (double f : {0.25, 0.5, 0.75}) check_times.push_back(detail::snap(grid, f));
    std::vector<double> times = pair_times(pairs);
    times.insert(times.end(), check_times.begin(), check_times.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<AzemaPath> paths(n);
    PathBundle B_snap(times, n);
    PathBundle L0_snap(times, n);
    PathBundle JY_snap(times, n);
    Table honest_path{"honest_path", {"t", "B", "L0", "Z", "AL"}, {}};
    const auto stride = static_cast<std::size_t>(stride_param);

    parallel_for(n, config.threads, [&](std::size_t p) {
        RandomStream s0 = rng.stream(p, 0);
        const SamplePath B_full = simulate_bm(full, s0);
        auto& d = paths[p];
        RandomStream s1 = rng.stream(p, 1);
        d.L = last_zero_before_one(B_full, s1);
        const HonestPieces fine = honest_pieces(B_full);
        const auto z_at = [&](std::size_t i) { return azema_supermartingale(fine.working[i], grid.time(i)); };
        const JeulinYorResult jy = jeulin_yor_compensator(z_at, fine.AL, d.L, floor);
        d.clipped_mass = jy.clipped_mass;
        d.clipped_steps = jy.clipped_steps;
        d.AL_terminal = fine.AL.back();
        B_snap.set_row(p, fine.working);
        L0_snap.set_row(p, fine.L0);
        JY_snap.set_row(p, jy.compensator);
        d.fine = mass_decomposition(fine.AL, near_zero(fine.working, fine.eps), fine.eps);
        const HonestPieces coarse = honest_pieces(B_full.subsampled(2));
        d.coarse = mass_decomposition(coarse.AL, near_zero(coarse.working, coarse.eps), coarse.eps);

        if (p == 0) {
            const SamplePath Z = azema_path(fine.working);
            for (std::size_t i = 0; i < grid.n_points(); i += stride) {
                honest_path.rows.push_back({grid.time(i), fine.working[i], fine.L0[i], Z[i], fine.AL[i]});
            }
        }
    });
    report.tables.push_back(std::move(honest_path));

    Observations obs(n);
    {
        std::vector<StoppingSample> L(n);
        for (std::size_t p = 0; p < n; ++p) L[p] = paths[p].L;
        obs.add_random_time("L", std::move(L));
    }
    obs.add_channel("B", B_snap);
    obs.add_channel("local_time", L0_snap);

    // (a) P(L > t | B_t) against 2 Phi(-|B_t| / sqrt(1 - t)) on equal-probability bins of |B_t|
    {
        Table table{"azema_formula", {"t", "abs_B_mean", "observed", "target", "lo", "hi"}, {}};
        double worst = -1.0;
        double worst_se = 0.0;
        const auto z_bins = static_cast<std::size_t>(z_bins_param);
        for (double t : check_times) {
            const std::size_t col = B_snap.column_of(t);
            std::vector<double> x(n);
            for (std::size_t p = 0; p < n; ++p) x[p] = std::abs(B_snap.at(p, col));
            const Binning bins = Binning::equal_probability(x, z_bins);
            std::vector<std::vector<std::size_t>> members(bins.size());
            for (std::size_t p = 0; p < n; ++p) members[bins.bin_of(x[p])].push_back(p);
            for (const auto& m : members) {
                if (m.empty()) continue;
                std::vector<double> hit(m.size());
                std::vector<double> formula(m.size());
                std::vector<double> diff(m.size());
                std::vector<double> level(m.size());
                for (std::size_t k = 0; k < m.size(); ++k) {
                    hit[k] = paths[m[k]].L.value > t ? 1.0 : 0.0;
                    formula[k] = azema_supermartingale(x[m[k]], t);
                    diff[k] = hit[k] - formula[k];
                    level[k] = x[m[k]];
                }
                const auto h = detail::mean_se(hit);
                const auto f = detail::mean_se(formula);
                const auto d = detail::mean_se(diff);
                table.rows.push_back(
                    {t, detail::mean_se(level).mean, h.mean, f.mean, h.mean - 3.0 * h.se, h.mean + 3.0 * h.se});
                if (std::abs(h.mean - f.mean) > worst) {
                    worst = std::abs(h.mean - f.mean);
                    worst_se = d.se;
                }
            }
        }
        report.add_metric(make_metric("azema_formula_sup_error", worst, param(config, "z_tol"), 0.0,
                                      Comparison::AtMost, worst_se));
        report.tables.push_back(std::move(table));
    }

    // (b) A^L lives on {|B| <= eps}; its Lebesgue share shrinks as the step halves
    {
        SingularityTally fine;
        SingularityTally coarse;
        std::vector<double> terminal(n);
        double clipped = 0.0;
        std::size_t clipped_steps = 0;
        for (std::size_t p = 0; p < n; ++p) {
            fine.add(paths[p].fine);
            coarse.add(paths[p].coarse);
            terminal[p] = paths[p].AL_terminal;
            clipped += paths[p].clipped_mass;
            clipped_steps += paths[p].clipped_steps;
        }
        const auto f = fine.pooled();
        const auto c = coarse.pooled();
        report.add_metric(make_metric("AL_mass_on_set", f.mass_on_set, param(config, "mass_min"), 0.0,
                                      Comparison::AtLeast));
        report.add_metric(make_metric("AL_mass_on_set_coarse", c.mass_on_set, param(config, "mass_min"), 0.0,
                                      Comparison::AtLeast));
        report.add_metric(make_metric("AL_lebesgue_ratio_fine_over_coarse",
                                      f.lebesgue_fraction() / c.lebesgue_fraction(), 1.0, 0.0, Comparison::AtMost));
        report.notes.push_back("A^L Lebesgue fraction of the support set: fine " +
                               format_number(f.lebesgue_fraction()) + ", coarse " +
                               format_number(c.lebesgue_fraction()));
        const auto ms = detail::mean_se(terminal);
        report.add_metric(make_metric("AL_terminal_mean", ms.mean, arcsine_cdf(grid.horizon()),
                                      param(config, "terminal_tol"), Comparison::Within, ms.se));
        report.notes.push_back("Jeulin-Yor floor " + format_number(floor) + " clipped mass " +
                               format_number(clipped) + " over " + std::to_string(clipped_steps) + " steps");
    }

    // (c) Jeulin-Yor compensator under the expanded view, with controls
    {
        PathBundle M(times, n);
        PathBundle M_zero(times, n);
        PathBundle M_minimal(times, n);
        const Law arcsine = Law::table([] {
            std::vector<std::pair<double, double>> knots;
            const std::size_t k = 4096;
            for (std::size_t i = 0; i <= k; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(k);
                knots.emplace_back(t, arcsine_cdf(t) * (1.0 - 1e-9));
            }
            return knots;
        }());
        parallel_for(n, config.threads, [&](std::size_t p) {
            const StoppingSample& L = paths[p].L;
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double t = times[j];
                const double jump = L.occurred_by(t) ? 1.0 : 0.0;
                M.at(p, j) = jump - JY_snap.at(p, j);
                M_zero.at(p, j) = jump;
                M_minimal.at(p, j) = jump - log_survival_compensator(arcsine, t, L.value);
            }
        });
        const FiltrationView view = expanded_view();
        const auto functionals = expanded_functionals();
        report.attach("expanded_view_jeulin_yor",
                      test_orthogonality(M, obs, view, functionals, pairs,
                                         detail::orthogonality_options(config, "expanded_view_jeulin_yor")),
                      true);
        report.attach("control_expanded_view_zero",
                      test_orthogonality(M_zero, obs, view, functionals, pairs,
                                         detail::orthogonality_options(config, "control_expanded_view_zero")),
                      false);
        report.attach("control_expanded_view_arcsine_hazard",
                      test_orthogonality(M_minimal, obs, view, functionals, pairs,
                                         detail::orthogonality_options(config, "control_expanded_view_arcsine_hazard")),
                      false);
    }

    // (d) law of L against the arcsine law
    {
        std::vector<double> samples(n);
        for (std::size_t p = 0; p < n; ++p) samples[p] = paths[p].L.value;
        report.add_metric(make_metric("last_zero_ks", ks_distance(samples, arcsine_cdf), param(config, "ks_tol"), 0.0,
                                      Comparison::AtMost));
        Table curve = make_curve("last_zero_law");
        std::sort(samples.begin(), samples.end());
        for (std::size_t k = 1; k <= 64; ++k) {
            const double t = static_cast<double>(k) / 64.0;
            const double f = static_cast<double>(std::upper_bound(samples.begin(), samples.end(), t) - samples.begin()) /
                             static_cast<double>(n);
            const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(n));
            add_curve_point(curve, t, f, arcsine_cdf(t), f - 3.0 * se, f + 3.0 * se);
        }
        report.tables.push_back(std::move(curve));
    }

    report.reevaluate();
    return report;
}

}  // namespace complab
