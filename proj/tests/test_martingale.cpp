#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "complab/compensator.hpp"
#include "complab/errors.hpp"
#include "complab/martingale.hpp"
#include "complab/observation.hpp"
#include "complab/rng.hpp"
#include "complab/sim_core.hpp"

using namespace complab;

namespace {

std::vector<TestFunctional> eight_functionals() {
    return {
        TestFunctional::constant_one(),
        TestFunctional::bin_indicator("occurred", 0.5, 1.5),
        TestFunctional::bin_indicator("stopped_fraction", 0.0, 1.0 / 3.0),
        TestFunctional::bin_indicator("stopped_fraction", 1.0 / 3.0, 2.0 / 3.0),
        TestFunctional::bin_indicator("stopped_fraction", 2.0 / 3.0, 1.0),
        TestFunctional::bin_indicator("stopped_fraction", 1.0, 2.0),
        TestFunctional::clipped_polynomial("stopped", {0.0, 1.0 / 3.0}, 1.0),
        TestFunctional::clipped_polynomial("stopped_fraction", {0.0, -1.0, 1.0}, 1.0),
    };
}

struct ExponentialSetup {
    std::vector<StoppingSample> R;
    PathBundle M_good;
    PathBundle M_zero;
    Observations obs;
    std::vector<TimePair> pairs;

    explicit ExponentialSetup(std::size_t n)
        : M_good({}, 0), M_zero({}, 0), obs(n), pairs(pair_grid({0.25, 0.5, 1.0}, {1.5, 2.0, 3.0})) {
        const std::vector<double> times = pair_times(pairs);
        M_good = PathBundle(times, n);
        M_zero = PathBundle(times, n);
        const Law law = Law::exponential(1.0);
        for (std::size_t p = 0; p < n; ++p) {
            RandomStream s(31, p);
            R.push_back(StoppingSample::at(law.quantile(s.uniform())));
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double jump = R[p].occurred_by(times[j]) ? 1.0 : 0.0;
                M_good.at(p, j) = jump - dellacherie_compensator(law, times[j], R[p].value);
                M_zero.at(p, j) = jump;
            }
        }
        obs.add_random_time("R", R);
    }
};

}  // namespace

TEST(PairGrid, KeepsOrderedPairs) {
    const auto pairs = pair_grid({0.5, 1.0}, {0.75, 2.0});
    ASSERT_EQ(pairs.size(), 3u);
    EXPECT_EQ(pair_times(pairs), (std::vector<double>{0.5, 0.75, 1.0, 2.0}));
}

TEST(CompensatedIndicator, Examples) {
    const TimeGrid g(2.0, 20);
    const SamplePath zero = compensated_indicator(StoppingSample::never(), IncreasingPath(g));
    for (double v : zero.values) EXPECT_EQ(v, 0.0);

    std::vector<double> id(g.n_points());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = g.time(i);
    const SamplePath M = compensated_indicator(StoppingSample::at(1.0), IncreasingPath(g, id));
    for (std::size_t i = 0; i < g.n_points(); ++i) {
        EXPECT_NEAR(M[i], (g.time(i) >= 1.0 ? 1.0 : 0.0) - g.time(i), 1e-15);
    }
}

TEST(StopAt, InterpolatesInsideStep) {
    const TimeGrid g(1.0, 10);
    std::vector<double> id(g.n_points());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = g.time(i);
    const IncreasingPath stopped = stop_at(IncreasingPath(g, id), StoppingSample::at(0.35));
    EXPECT_NEAR(stopped[3], 0.3, 1e-15);
    EXPECT_NEAR(stopped[4], 0.35, 1e-15);
    EXPECT_NEAR(stopped.back(), 0.35, 1e-15);
    const IncreasingPath exact = stop_at(IncreasingPath(g, id), StoppingSample::at(0.35), 0.33);
    EXPECT_NEAR(exact.back(), 0.33, 1e-15);
}

TEST(QuadraticVariation, Examples) {
    const TimeGrid g(2.0, 200);
    const SamplePath flat(g, std::vector<double>(g.n_points(), 3.0));
    EXPECT_EQ(quadratic_variation_discrete(flat).back(), 0.0);

    const SamplePath jump = compensated_indicator(StoppingSample::at(1.0), IncreasingPath(g));
    const IncreasingPath qv = quadratic_variation_discrete(jump);
    for (std::size_t i = 0; i < g.n_points(); ++i) EXPECT_EQ(qv[i], g.time(i) >= 1.0 ? 1.0 : 0.0);

    std::vector<double> a(g.n_points());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::min(g.time(i), 1.0);
    const IncreasingPath drift(g, a);
    const double terminal = quadratic_variation_discrete(compensated_indicator(StoppingSample::at(1.0), drift)).back();
    EXPECT_NEAR(terminal, 1.0, 2.0 * g.step() + 1e-12);
}

TEST(Functionals, StayBounded) {
    Observations obs(3);
    obs.add_random_time("R", {StoppingSample::at(0.2), StoppingSample::at(5.0), StoppingSample::never()});
    const FiltrationView view = minimal_view("R");
    for (const TestFunctional& h : eight_functionals()) {
        for (std::size_t p = 0; p < 3; ++p) {
            for (double s : {0.1, 1.0, 4.0}) {
                const double v = h.evaluate(view, obs.at(p, s));
                EXPECT_LE(std::abs(v), h.bound());
            }
        }
    }
    EXPECT_THROW(view.observable("missing"), std::exception);
}

TEST(Orthogonality, ZeroMartingaleIsExactlyZero) {
    const std::size_t n = 2000;
    const auto pairs = pair_grid({0.5}, {1.0, 2.0});
    PathBundle M(pair_times(pairs), n);
    Observations obs(n);
    obs.add_random_time("R", std::vector<StoppingSample>(n, StoppingSample::at(1.0)));
    const MartingaleReport r = test_orthogonality(M, obs, minimal_view("R"), eight_functionals(), pairs);
    EXPECT_TRUE(r.overall_pass);
    for (const auto& row : r.rows) EXPECT_EQ(row.estimate, 0.0);
}

TEST(Orthogonality, TooFewPathsThrows) {
    const auto pairs = pair_grid({0.5}, {1.0});
    PathBundle M(pair_times(pairs), 10);
    Observations obs(10);
    obs.add_random_time("R", std::vector<StoppingSample>(10, StoppingSample::at(1.0)));
    EXPECT_THROW(test_orthogonality(M, obs, minimal_view("R"), eight_functionals(), pairs), InsufficientPaths);
}

TEST(Orthogonality, ExponentialCompensatorPassesZeroFails) {
    const ExponentialSetup setup(100000);
    const FiltrationView view = minimal_view("R");
    const MartingaleReport good = test_orthogonality(setup.M_good, setup.obs, view, eight_functionals(), setup.pairs);
    EXPECT_EQ(good.rows.size(), 9u * 8u);
    EXPECT_TRUE(good.overall_pass);
    for (const auto& row : good.rows) EXPECT_LE(std::abs(row.z), 4.0) << row.functional;

    const MartingaleReport bad = test_orthogonality(setup.M_zero, setup.obs, view, eight_functionals(), setup.pairs);
    EXPECT_FALSE(bad.overall_pass);
    EXPECT_GT(bad.max_abs_z("one"), 10.0);
}

TEST(Orthogonality, UncompensatedIndicatorEstimate) {
    const std::size_t n = 100000;
    const auto pairs = std::vector<TimePair>{{0.0, 1.0}};
    PathBundle M(pair_times(pairs), n);
    std::vector<StoppingSample> R;
    for (std::size_t p = 0; p < n; ++p) {
        RandomStream s(9, p);
        R.push_back(StoppingSample::at(s.exponential()));
        M.at(p, 1) = R.back().occurred_by(1.0) ? 1.0 : 0.0;
    }
    Observations obs(n);
    obs.add_random_time("R", R);
    const MartingaleReport r =
        test_orthogonality(M, obs, minimal_view("R"), {TestFunctional::constant_one()}, pairs);
    EXPECT_NEAR(r.rows[0].estimate, 1.0 - std::exp(-1.0), 0.01);
    EXPECT_FALSE(r.overall_pass);
}

TEST(Orthogonality, IndependentOfThreads) {
    const ExponentialSetup setup(5000);
    OrthogonalityOptions one;
    OrthogonalityOptions many;
    many.threads = 8;
    const auto a = test_orthogonality(setup.M_good, setup.obs, minimal_view("R"), eight_functionals(), setup.pairs, one);
    const auto b = test_orthogonality(setup.M_good, setup.obs, minimal_view("R"), eight_functionals(), setup.pairs, many);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].estimate, b.rows[i].estimate);
        EXPECT_EQ(a.rows[i].std_error, b.rows[i].std_error);
    }
}

TEST(ZScore, Conventions) {
    EXPECT_EQ(z_score(0.0, 0.0), 0.0);
    EXPECT_TRUE(std::isinf(z_score(0.1, 0.0)));
    EXPECT_DOUBLE_EQ(z_score(0.2, 0.1), 2.0);
}

TEST(EthierKurtz, PoissonFirstJump) {
    const std::size_t n = 20000;
    const auto pairs = pair_grid({0.25, 0.5}, {1.0, 1.5});
    const auto times = pair_times(pairs);
    PathBundle A(times, n);
    std::vector<StoppingSample> R;
    for (std::size_t p = 0; p < n; ++p) {
        RandomStream s(12, p);
        const JumpTimes j = simulate_poisson(1.0, 2.0, s);
        R.push_back(j.empty() ? StoppingSample::never() : StoppingSample::at(j.times()[0]));
        for (std::size_t k = 0; k < times.size(); ++k) A.at(p, k) = R.back().stopped(times[k]);
    }
    Observations obs(n);
    obs.add_random_time("R", R);
    const FiltrationView view = minimal_view("R");
    EXPECT_TRUE(check_ethier_kurtz(A, obs, view, "stopped", BinSpec{}, 1.0, pairs).overall_pass);
    EXPECT_FALSE(check_ethier_kurtz(A, obs, view, "stopped", BinSpec{}, 0.4, pairs).overall_pass);
}

TEST(EthierKurtz, LocalTimeNearZeroBeatsLinearBound) {
    const std::size_t n = 4000;
    const TimeGrid g(1.0, 8192);
    const double h = 0.01;
    const double s = 0.5;
    const double t = g.time(g.nearest_index(s + h));
    const std::vector<TimePair> pairs{{s, t}};
    PathBundle A(pair_times(pairs), n);
    PathBundle absB(pair_times(pairs), n);
    for (std::size_t p = 0; p < n; ++p) {
        RandomStream r(44, p);
        const SamplePath B = simulate_bm(g, r);
        const IncreasingPath L = local_time_zero(B, default_local_time_epsilon(g));
        A.set_row(p, L);
        std::vector<double> ab(B.values);
        for (double& v : ab) v = std::abs(v);
        absB.set_row(p, SamplePath(g, ab));
    }
    Observations obs(n);
    obs.add_channel("abs_B", absB);
    FiltrationView view{"brownian", {}};
    view.add("abs_B", [](const ObservedAt& at) { return at.channel("abs_B"); });
    BinSpec bins;
    bins.fixed = Binning({0.0, 0.05});
    const EthierKurtzReport r = check_ethier_kurtz(A, obs, view, "abs_B", bins, 4.0, pairs);
    EXPECT_FALSE(r.overall_pass);
    ASSERT_FALSE(r.rows.empty());
    const auto& near = r.rows.front();
    EXPECT_EQ(near.bin, 0u);
    EXPECT_GT(near.estimate, 4.0 * h);
    EXPECT_NEAR(near.estimate, std::sqrt(2.0 * h / std::numbers::pi), 0.03);
}
