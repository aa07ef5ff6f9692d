#include <algorithm>
#include <cmath>

#include "complab/filtration_ops.hpp"
#include "complab/parallel.hpp"
#include "complab/rng.hpp"
#include "complab/sim_core.hpp"
#include "scenario_util.hpp"

namespace complab {

namespace {

StoppingSample first_jump(double rate, double horizon, RandomStream& stream) {
    const JumpTimes jumps = simulate_poisson(rate, horizon, stream);
    return jumps.empty() ? StoppingSample::never() : StoppingSample::at(jumps.times()[0]);
}

IncreasingPath first_jump_compensator(const TimeGrid& grid, double rate, const StoppingSample& R) {
    std::vector<double> values(grid.n_points());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = rate * R.stopped(grid.time(i));
    return IncreasingPath(grid, std::move(values));
}

IncreasingPath tilted(const TimeGrid& grid, double lambda, double mu, const StoppingSample& R,
                      const BracketRegistry& registry, const std::string& bracket) {
    const DensityMartingale Z(poisson_tilt_density(grid, lambda, mu, R));
    return girsanov_compensator(first_jump_compensator(grid, lambda, R), Z, R, registry, bracket);
}

}  // namespace

ScenarioReport run_poisson_tilt(const ScenarioConfig& config) {
    using detail::param;
    const double lambda = param(config, "lambda");
    const double mu = param(config, "mu");
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw ConfigError("poisson-tilt: lambda and mu must be positive");
    }
    ScenarioReport report = detail::start_report(config);
    const TimeGrid grid(config.horizon, config.n_steps);
    const double H = grid.horizon();
    const std::size_t n = config.n_paths;
    const RngSpec rng{config.seed};
    const auto pairs = detail::snapped_pairs(grid, {0.1, 0.25, 0.5}, {0.6, 0.8, 1.0});
    const auto times = pair_times(pairs);

    BracketRegistry registry;
    registry.register_bracket("poisson_tilt", poisson_tilt_bracket(lambda, mu));
    registry.register_bracket("untilted", poisson_tilt_bracket(lambda, lambda));

    // P-paths go through the Girsanov transform, Q-paths are simulated directly
    std::vector<StoppingSample> R(n);
    std::vector<StoppingSample> RQ(n);
    std::vector<double> girsanov_terminal(n);
    std::vector<double> max_rate(n);
    std::vector<double> untilted_gap(n);
    PathBundle AQ_on_Q(times, n);
    parallel_for(n, config.threads, [&](std::size_t p) {
        RandomStream s0 = rng.stream(p, 0);
        R[p] = first_jump(lambda, H, s0);
        const IncreasingPath AQ = tilted(grid, lambda, mu, R[p], registry, "poisson_tilt");
        girsanov_terminal[p] = AQ.back();
        double rate = 0.0;
        for (std::size_t i = 0; i + 1 < AQ.size(); ++i) rate = std::max(rate, AQ.increment(i) / grid.step());
        max_rate[p] = rate;

        const IncreasingPath same = tilted(grid, lambda, lambda, R[p], registry, "untilted");
        const IncreasingPath base = first_jump_compensator(grid, lambda, R[p]);
        double gap = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) gap = std::max(gap, std::abs(same[i] - base[i]));
        untilted_gap[p] = gap;

        RandomStream s1 = rng.stream(p, 1);
        RQ[p] = first_jump(mu, H, s1);
        AQ_on_Q.set_row(p, tilted(grid, lambda, mu, RQ[p], registry, "poisson_tilt"));
    });

    // slope of A^Q on [0, R] from the transform vs events per unit exposure under Q
    double girsanov_sum = 0.0;
    double exposure_P = 0.0;
    double events_Q = 0.0;
    double exposure_Q = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        girsanov_sum += girsanov_terminal[p];
        exposure_P += R[p].stopped(H);
        events_Q += RQ[p].occurred_by(H) ? 1.0 : 0.0;
        exposure_Q += RQ[p].stopped(H);
    }
    const double girsanov_slope = girsanov_sum / exposure_P;
    const double direct_slope = events_Q / exposure_Q;
    const double direct_se = direct_slope / std::sqrt(std::max(events_Q, 1.0));
    report.add_metric(make_metric("tilted_slope", direct_slope, girsanov_slope,
                                  param(config, "slope_rel_tol") * girsanov_slope, Comparison::Within, direct_se));
    report.add_metric(make_metric("girsanov_slope_vs_mu", girsanov_slope, mu, 1e-9 * mu, Comparison::Within));
    report.add_metric(make_metric("untilted_max_gap", *std::max_element(untilted_gap.begin(), untilted_gap.end()),
                                  0.0, 0.0, Comparison::Within));
    report.add_metric(make_metric("max_increment_rate", *std::max_element(max_rate.begin(), max_rate.end()), mu,
                                  1e-9 * mu, Comparison::AtMost));

    // martingale test of the transformed compensator on paths simulated under Q
    Observations obs(n);
    obs.add_random_time("R", RQ);
    PathBundle M(times, n);
    PathBundle M_base(times, n);
    PathBundle M_zero(times, n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double t = times[j];
            const double jump = RQ[p].occurred_by(t) ? 1.0 : 0.0;
            M.at(p, j) = jump - AQ_on_Q.at(p, j);
            M_base.at(p, j) = jump - lambda * RQ[p].stopped(t);
            M_zero.at(p, j) = jump;
        }
    }
    const FiltrationView minimal = minimal_view("R");
    const auto functionals = detail::minimal_functionals(H);
    report.attach("q_paths_girsanov",
                  test_orthogonality(M, obs, minimal, functionals, pairs,
                                     detail::orthogonality_options(config, "q_paths_girsanov")),
                  true);
    report.attach("control_q_paths_base_compensator",
                  test_orthogonality(M_base, obs, minimal, functionals, pairs,
                                     detail::orthogonality_options(config, "control_q_paths_base_compensator")),
                  lambda == mu);
    report.attach("control_q_paths_zero",
                  test_orthogonality(M_zero, obs, minimal, functionals, pairs,
                                     detail::orthogonality_options(config, "control_q_paths_zero")),
                  false);
    report.attach("q_paths_ek_K_mu",
                  check_ethier_kurtz(AQ_on_Q, obs, minimal, "stopped", BinSpec{}, mu, pairs, "q_paths_ek_K_mu"), true);

    // E_Q 1{R <= t} against E_Q A^Q_t
    Table curve = make_curve("q_compensator");
    {
        std::vector<double> jumps(n);
        std::vector<double> comp(n);
        const std::size_t points = 20;
        for (std::size_t k = 1; k <= points; ++k) {
            const double t = detail::snap(grid, H * static_cast<double>(k) / points);
            const std::size_t i = grid.index_of(t);
            for (std::size_t p = 0; p < n; ++p) {
                jumps[p] = RQ[p].occurred_by(t) ? 1.0 : 0.0;
                comp[p] = mu * RQ[p].stopped(grid.time(i));
            }
            const auto j = detail::mean_se(jumps);
            const auto c = detail::mean_se(comp);
            add_curve_point(curve, t, j.mean, c.mean, j.mean - 3.0 * j.se, j.mean + 3.0 * j.se);
        }
    }
    report.tables.push_back(std::move(curve));

    report.reevaluate();
    return report;
}

}  // namespace complab
