#include <algorithm>
#include <cmath>
#include <limits>

#include "complab/compensator.hpp"
#include "complab/law.hpp"
#include "complab/parallel.hpp"
#include "complab/rng.hpp"
#include "complab/sim_core.hpp"
#include "scenario_util.hpp"

namespace complab {

namespace {

struct DellacheriePath {
    StoppingSample R;
    StoppingSample R1;  // Poisson sub-case: first and second jump
    StoppingSample R2;
};

// Largest |A_integral - A_log| over the grid, up to where the law degenerates.
double integral_vs_log(const Law& law, const TimeGrid& grid, std::vector<std::string>& notes) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const double t = grid.time(i);
        try {
            worst = std::max(worst, std::abs(dellacherie_compensator(law, t) - log_survival_compensator(law, t)));
        } catch (const DegenerateLaw&) {
            notes.push_back("law degenerates before t = " + format_number(t) + "; comparison stops there");
            break;
        }
    }
    return worst;
}

FiltrationView poisson_view() {
    FiltrationView view{"poisson(N, R1, R2)", {}};
    view.add("one", [](const ObservedAt&) { return 1.0; });
    view.add("N", [](const ObservedAt& at) { return at.channel("N"); });
    view.add("R1_stopped_fraction", [](const ObservedAt& at) { return at.stopped("R1") / at.time(); });
    view.add("R2_stopped_fraction", [](const ObservedAt& at) { return at.stopped("R2") / at.time(); });
    view.add("R2_occurred", [](const ObservedAt& at) { return at.occurred("R2") ? 1.0 : 0.0; });
    return view;
}

std::vector<TestFunctional> poisson_functionals() {
    return {
        TestFunctional::constant_one(),
        TestFunctional::bin_indicator("N", 0.0, 1.0),
        TestFunctional::bin_indicator("N", 1.0, 2.0),
        TestFunctional::bin_indicator("N", 2.0, 3.0),
        TestFunctional::bin_indicator("R2_occurred", 0.5, 1.5),
        TestFunctional::clipped_polynomial("R1_stopped_fraction", {0.0, 1.0}, 1.0),
        TestFunctional::clipped_polynomial("R2_stopped_fraction", {0.0, 1.0}, 1.0),
        TestFunctional::clipped_polynomial("N", {0.0, 0.5}, 1.0),
    };
}

}  // namespace

ScenarioReport run_dellacherie(const ScenarioConfig& config) {
    using detail::param;
    ScenarioReport report = detail::start_report(config);
    const Law law = Law::from_json(config.params.at("law"));
    const double lambda = param(config, "poisson_rate");
    if (!(lambda > 0.0)) {
        throw ConfigError("dellacherie: poisson_rate must be positive");
    }
    const TimeGrid grid(config.horizon, config.n_steps);
    const double H = grid.horizon();
    const std::size_t n = config.n_paths;
    const RngSpec rng{config.seed};

    const auto pairs = detail::snapped_pairs(grid, {1.0 / 12.0, 1.0 / 6.0, 1.0 / 3.0}, {0.5, 2.0 / 3.0, 1.0});
    const auto times = pair_times(pairs);

    std::vector<DellacheriePath> paths(n);
    parallel_for(n, config.threads, [&](std::size_t p) {
        RandomStream s0 = rng.stream(p, 0);
        const double r = law.quantile(s0.uniform());
        paths[p].R = r <= H ? StoppingSample::at(r) : StoppingSample::never();
        RandomStream s1 = rng.stream(p, 1);
        const JumpTimes jumps = simulate_poisson(lambda, H, s1);
        if (jumps.size() >= 1) paths[p].R1 = StoppingSample::at(jumps.times()[0]);
        if (jumps.size() >= 2) paths[p].R2 = StoppingSample::at(jumps.times()[1]);
    });

    // ---- the law itself
    if (law.has_atoms()) {
        report.flags.push_back("not_totally_inaccessible");
        double biggest = 0.0;
        for (const auto& atom : law.atoms()) {
            biggest = std::max(biggest, atom.mass / (1.0 - law.cdf_left(atom.time)));
        }
        report.notes.push_back("law has atoms; largest compensator jump " + format_number(biggest) +
                               " (a predictable part, so R is not totally inaccessible)");
    } else {
        report.add_metric(make_metric("integral_vs_log_max_diff", integral_vs_log(law, grid, report.notes), 0.0,
                                      1e-6, Comparison::AtMost));
    }
    {
        Table curve = make_curve("compensator");
        for (std::size_t i = 0; i < grid.n_points(); ++i) {
            const double t = grid.time(i);
            double a = 0.0;
            try {
                a = dellacherie_compensator(law, t);
            } catch (const DegenerateLaw&) {
                break;
            }
            const double target = law.has_atoms() ? a : log_survival_compensator(law, t);
            add_curve_point(curve, t, a, target, target, target);
        }
        report.tables.push_back(std::move(curve));
    }

    // ---- minimal-filtration martingale test
    Observations obs(n);
    {
        std::vector<StoppingSample> r(n), r1(n), r2(n);
        for (std::size_t p = 0; p < n; ++p) {
            r[p] = paths[p].R;
            r1[p] = paths[p].R1;
            r2[p] = paths[p].R2;
        }
        obs.add_random_time("R", std::move(r));
        obs.add_random_time("R1", std::move(r1));
        obs.add_random_time("R2", std::move(r2));
    }
    PathBundle M(times, n);
    PathBundle M_zero(times, n);
    parallel_for(n, config.threads, [&](std::size_t p) {
        const StoppingSample& R = paths[p].R;
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double t = times[j];
            const double jump = R.occurred_by(t) ? 1.0 : 0.0;
            M.at(p, j) = jump - dellacherie_compensator(law, t, R.value);
            M_zero.at(p, j) = jump;
        }
    });
    const FiltrationView minimal = minimal_view("R");
    const auto functionals = detail::minimal_functionals(H);
    report.attach("minimal_view",
                  test_orthogonality(M, obs, minimal, functionals, pairs,
                                     detail::orthogonality_options(config, "minimal_view")),
                  true);
    MartingaleReport zero = test_orthogonality(M_zero, obs, minimal, functionals, pairs,
                                               detail::orthogonality_options(config, "control_zero_compensator"));
    report.add_metric(make_metric("control_zero_max_abs_z", zero.max_abs_z("one"), param(config, "control_min_z"),
                                  0.0, Comparison::AtLeast));
    report.attach("control_zero_compensator", std::move(zero), false);

    // ---- Poisson sub-case: first jump and Ethier-Kurtz
    PathBundle A1(times, n);
    PathBundle M2_law(times, n);
    PathBundle M2_poisson(times, n);
    PathBundle A2_poisson(times, n);
    PathBundle N(times, n);
    const Law gamma = Law::gamma(2, lambda);
    parallel_for(n, config.threads, [&](std::size_t p) {
        const auto& d = paths[p];
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double t = times[j];
            A1.at(p, j) = lambda * d.R1.stopped(t);
            const double a2 = lambda * (d.R2.stopped(t) - d.R1.stopped(t));
            A2_poisson.at(p, j) = a2;
            const double jump = d.R2.occurred_by(t) ? 1.0 : 0.0;
            M2_poisson.at(p, j) = jump - a2;
            M2_law.at(p, j) = jump - dellacherie_compensator(gamma, t, d.R2.value);
            N.at(p, j) = (d.R1.occurred_by(t) ? 1.0 : 0.0) + jump;
        }
    });
    obs.add_channel("N", std::move(N));

    const FiltrationView first_jump = minimal_view("R1");
    BinSpec quantiles;
    report.attach("poisson_ek_K_rate",
                  check_ethier_kurtz(A1, obs, first_jump, "stopped", quantiles, lambda, pairs, "poisson_ek_K_rate"),
                  true);
    const double bad_k = param(config, "ek_bad_factor") * lambda;
    report.attach("poisson_ek_K_bad",
                  check_ethier_kurtz(A1, obs, first_jump, "stopped", quantiles, bad_k, pairs, "poisson_ek_K_bad"),
                  false);

    // ---- second jump: Gamma(2, lambda) law, minimal and Poisson filtrations
    report.add_metric(make_metric("gamma_integral_vs_log_max_diff", integral_vs_log(gamma, grid, report.notes), 0.0,
                                  1e-6, Comparison::AtMost));
    report.attach("gamma_minimal_view",
                  test_orthogonality(M2_law, obs, minimal_view("R2"), functionals, pairs,
                                     detail::orthogonality_options(config, "gamma_minimal_view")),
                  true);
    report.attach("gamma_poisson_view",
                  test_orthogonality(M2_poisson, obs, poisson_view(), poisson_functionals(), pairs,
                                     detail::orthogonality_options(config, "gamma_poisson_view")),
                  true);
    BinSpec count_bins;
    count_bins.fixed = Binning({0.0, 1.0, 2.0});
    report.attach("gamma_poisson_ek",
                  check_ethier_kurtz(A2_poisson, obs, poisson_view(), "N", count_bins, lambda, pairs,
                                     "gamma_poisson_ek"),
                  true);
    double max_rate = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& [s, t] : pairs) {
            const double inc = A2_poisson.at(p, A2_poisson.column_of(t)) - A2_poisson.at(p, A2_poisson.column_of(s));
            max_rate = std::max(max_rate, inc / (t - s));
        }
    }
    report.add_metric(make_metric("gamma_max_increment_rate", max_rate, lambda, 1e-9 * lambda, Comparison::AtMost));

    report.reevaluate();
    return report;
}

}  // namespace complab
