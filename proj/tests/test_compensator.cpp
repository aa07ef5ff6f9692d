#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "complab/compensator.hpp"
#include "complab/errors.hpp"
#include "complab/law.hpp"
#include "complab/quadrature.hpp"
#include "complab/rng.hpp"
#include "complab/sim_core.hpp"
#include "json.hpp"

using namespace complab;

namespace {

// Hazard oracle for a purely atomic law: sum of dF(u) / (1 - F(u-)) by enumeration.
std::vector<double> atomic_hazard_oracle(const std::vector<Atom>& atoms) {
    std::vector<double> out;
    double before = 0.0;
    for (const Atom& a : atoms) {
        out.push_back(a.mass / (1.0 - before));
        before += a.mass;
    }
    return out;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// survival of the time-changed Poisson first jump: E exp(-L_t) = 2 e^{t/2} Phi(-sqrt t)
double counterexample_survival(double t) { return 2.0 * std::exp(0.5 * t) * std_normal_cdf(-std::sqrt(t)); }

double counterexample_density(double t) {
    const double phi = std::exp(-0.5 * t) / std::sqrt(2.0 * std::numbers::pi);
    return -(std::exp(0.5 * t) * std_normal_cdf(-std::sqrt(t)) - std::exp(0.5 * t) * phi / std::sqrt(t));
}

}  // namespace

TEST(Quadrature, Polynomial) {
    EXPECT_NEAR(adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0), 4.0, 1e-12);
    EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0), std::exp(1.0) - 1.0, 1e-9);
}

TEST(Law, CdfAndLeftLimits) {
    const Law law = Law::atomic({{1.0, 0.5}, {2.0, 0.3}, {3.0, 0.2}});
    EXPECT_DOUBLE_EQ(law.cdf(2.0), 0.8);
    EXPECT_DOUBLE_EQ(law.cdf_left(2.0), 0.5);
    EXPECT_DOUBLE_EQ(law.cdf(2.5), 0.8);
    EXPECT_DOUBLE_EQ(law.quantile(0.6), 2.0);
    EXPECT_NEAR(Law::exponential(2.0).cdf(1.0), 1.0 - std::exp(-2.0), 1e-15);
}

TEST(Law, JsonRoundTrip) {
    const Law law(ExponentialPart{1.5, 0.5}, {{1.0, 0.25}});
    const Law back = Law::from_json(law.to_json());
    for (double u : {0.1, 0.9, 1.0, 1.5, 4.0}) EXPECT_DOUBLE_EQ(back.cdf(u), law.cdf(u));
    EXPECT_THROW(Law::from_json(nlohmann::json::parse(R"({"atoms": [], "continuous": {"kind": "weird"}})")),
                 ConfigError);
    EXPECT_THROW(Law::from_json(nlohmann::json::parse(R"({"atoms": [], "bogus": 1})")), ConfigError);
}

TEST(Dellacherie, ExponentialIsLinear) {
    EXPECT_NEAR(dellacherie_compensator(Law::exponential(2.0), 3.0), 6.0, 1e-8);
    EXPECT_NEAR(log_survival_compensator(Law::exponential(2.0), 3.0), 6.0, 1e-12);
}

TEST(Dellacherie, SingleFullAtom) {
    const Law law = Law::atomic({{1.0, 1.0}});
    EXPECT_EQ(dellacherie_compensator(law, 0.999), 0.0);
    EXPECT_DOUBLE_EQ(dellacherie_compensator(law, 2.0), 1.0);
}

TEST(Dellacherie, AtomicLawMatchesHazardOracle) {
    const std::vector<Atom> atoms{{1.0, 0.5}, {2.0, 0.3}, {3.0, 0.2}};
    const Law law = Law::atomic(atoms);
    const auto oracle = atomic_hazard_oracle(atoms);
    EXPECT_NEAR(oracle[0], 0.5, 1e-15);
    EXPECT_NEAR(oracle[1], 0.6, 1e-15);
    EXPECT_NEAR(oracle[2], 1.0, 1e-15);
    EXPECT_NEAR(dellacherie_increment(law, 0.0, 1.0), oracle[0], 1e-12);
    EXPECT_NEAR(dellacherie_increment(law, 1.0, 2.0), oracle[1], 1e-12);
    EXPECT_NEAR(dellacherie_increment(law, 2.0, 3.0), oracle[2], 1e-12);
    EXPECT_NEAR(dellacherie_compensator(law, 3.0), 2.1, 1e-12);
}

TEST(Dellacherie, UniformHalfMatchesLogForm) {
    const Law law = Law::uniform(0.0, 2.0);  // F(t) = t / 2 on [0, 1]
    EXPECT_NEAR(dellacherie_compensator(law, 1.0), std::log(2.0), 1e-9);
    EXPECT_NEAR(log_survival_compensator(law, 1.0), std::log(2.0), 1e-15);
}

TEST(Dellacherie, ZeroBeforeSupport) {
    EXPECT_EQ(log_survival_compensator(Law::uniform(1.0, 2.0), 0.5), 0.0);
    EXPECT_EQ(dellacherie_compensator(Law::uniform(1.0, 2.0), 0.5), 0.0);
}

TEST(Dellacherie, IntegralAgreesWithLogFormOnAtomFreeLaws) {
    const std::vector<Law> laws{Law::exponential(1.0), Law::exponential(3.5), Law::uniform(0.0, 4.0),
                                Law::uniform(0.5, 1.5), Law::gamma(2, 1.0), Law::gamma(3, 2.0)};
    for (const Law& law : laws) {
        for (double t = 0.05; t < 3.0; t += 0.05) {
            double log_form = 0.0;
            try {
                log_form = log_survival_compensator(law, t);
            } catch (const DegenerateLaw&) {
                continue;
            }
            ASSERT_NEAR(dellacherie_compensator(law, t), log_form, 1e-6 * std::max(1.0, log_form)) << t;
        }
    }
}

TEST(Dellacherie, MonotoneAndStoppedAtR) {
    const Law law(ExponentialPart{1.0, 0.7}, {{0.8, 0.1}, {1.6, 0.1}});
    double prev = 0.0;
    for (double t = 0.0; t <= 3.0; t += 0.01) {
        const double a = dellacherie_compensator(law, t, 1.2);
        ASSERT_GE(a, prev - 1e-15);
        prev = a;
    }
    EXPECT_DOUBLE_EQ(dellacherie_compensator(law, 2.0, 1.2), dellacherie_compensator(law, 1.2));
}

TEST(Dellacherie, DegenerateLawThrows) {
    EXPECT_THROW(dellacherie_compensator(Law::uniform(0.0, 1.0), 1.5), DegenerateLaw);
    EXPECT_THROW(log_survival_compensator(Law::atomic({{1.0, 0.5}}), 2.0), std::invalid_argument);
}

TEST(Dellacherie, GridMatchesPointwise) {
    const Law law = Law::gamma(2, 1.0);
    const TimeGrid g(3.0, 60);
    const IncreasingPath A = compensator_on_grid(law, g);
    for (std::size_t i = 0; i < g.n_points(); i += 7) {
        EXPECT_NEAR(A[i], dellacherie_compensator(law, g.time(i)), 1e-9);
    }
}

TEST(Hazard, Examples) {
    for (double t : {0.1, 1.0, 4.0}) EXPECT_NEAR(hazard_rate(Law::exponential(2.0), t), 2.0, 1e-12);
    EXPECT_NEAR(hazard_rate(Law::uniform(0.0, 1.0), 0.5), 2.0, 1e-12);
}

TEST(Hazard, CounterexampleLawAgainstFiniteDifferences) {
    std::vector<std::pair<double, double>> knots;
    for (int k = 1; k <= 40000; ++k) {
        const double u = 4.0 * k / 40000.0;
        knots.emplace_back(u, 1.0 - counterexample_survival(u));
    }
    const Law law = Law::table(knots);
    const double t = 1.0;
    const double h = 1e-5;
    const double fd_density = (counterexample_survival(t - h) - counterexample_survival(t + h)) / (2.0 * h);
    EXPECT_NEAR(counterexample_density(t), fd_density, 1e-8);
    const double hazard = hazard_rate(counterexample_density, law, t);
    EXPECT_NEAR(hazard, fd_density / counterexample_survival(t), 1e-6);
    EXPECT_NEAR(hazard, 0.26256, 5e-5);
}

TEST(EmpiricalLaw, AllSameValueIsOneAtom) {
    std::vector<StoppingSample> s(500, StoppingSample::at(1.0));
    const EmpiricalLaw e = empirical_law(s);
    ASSERT_EQ(e.law.atoms().size(), 1u);
    EXPECT_DOUBLE_EQ(e.law.atoms()[0].time, 1.0);
    EXPECT_DOUBLE_EQ(e.law.atoms()[0].mass, 1.0);
    EXPECT_EQ(e.ecdf_left(1.0), 0.0);
    EXPECT_EQ(e.ecdf(1.0), 1.0);
}

TEST(EmpiricalLaw, AllCensoredThrows) {
    std::vector<StoppingSample> s(500, StoppingSample::never());
    EXPECT_THROW(empirical_law(s), InsufficientData);
}

TEST(EmpiricalLaw, ExponentialWithinKs) {
    std::vector<StoppingSample> s;
    std::vector<double> raw;
    for (std::uint64_t p = 0; p < 100000; ++p) {
        RandomStream r(17, p);
        const double x = r.exponential() / 2.0;
        s.push_back(StoppingSample::at(x));
        raw.push_back(x);
    }
    const EmpiricalLaw e = empirical_law(s);
    EXPECT_FALSE(e.law.has_atoms());
    const auto cdf = [](double t) { return 1.0 - std::exp(-2.0 * t); };
    EXPECT_LE(ks_distance(raw, cdf), 0.01);
    for (double t : {0.1, 0.3, 0.7, 1.5}) EXPECT_NEAR(e.law.cdf(t), cdf(t), 0.01);
    EXPECT_GT(e.bandwidth, 0.0);
}

TEST(EmpiricalLaw, CensoredCountInDenominator) {
    std::vector<StoppingSample> s;
    for (int i = 0; i < 1000; ++i) s.push_back(StoppingSample::at(0.001 * (i + 1)));
    for (int i = 0; i < 1000; ++i) s.push_back(StoppingSample::never());
    const EmpiricalLaw e = empirical_law(s);
    EXPECT_EQ(e.n_total, 2000u);
    EXPECT_EQ(e.n_uncensored, 1000u);
    EXPECT_NEAR(e.ecdf(10.0), 0.5, 1e-12);
}

TEST(EmpiricalLaw, LeftLimitDiffersOnlyAtAtoms) {
    std::vector<StoppingSample> s;
    for (int i = 0; i < 900; ++i) s.push_back(StoppingSample::at(0.001 * (i + 1)));
    for (int i = 0; i < 100; ++i) s.push_back(StoppingSample::at(2.0));
    const EmpiricalLaw e = empirical_law(s);
    ASSERT_EQ(e.law.atoms().size(), 1u);
    EXPECT_LT(e.law.cdf_left(2.0), e.law.cdf(2.0));
    EXPECT_DOUBLE_EQ(e.law.cdf_left(0.5), e.law.cdf(0.5));
}

TEST(MassDecomposition, Examples) {
    const TimeGrid g(2.0, 10);
    std::vector<double> v(g.n_points());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.time(i);
    const IncreasingPath A(g, v);
    const SingularityReport all = mass_decomposition(A, std::vector<bool>(g.n_points(), true), 0.1);
    EXPECT_DOUBLE_EQ(all.mass_on_set, 1.0);
    EXPECT_DOUBLE_EQ(all.lebesgue_of_set, 2.0);

    std::vector<double> w(g.n_points(), 0.0);
    for (std::size_t i = 6; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>(i);
    std::vector<bool> ind(g.n_points(), false);
    for (std::size_t i = 0; i < 5; ++i) ind[i] = true;
    EXPECT_DOUBLE_EQ(mass_decomposition(IncreasingPath(g, w), ind, 0.1).mass_on_set, 0.0);

    EXPECT_THROW(mass_decomposition(IncreasingPath(g), ind, 0.1), ZeroMass);
}

TEST(MassDecomposition, LocalTimeLivesOnSmallSet) {
    const TimeGrid g(1.0, 1u << 14);
    const double eps = default_local_time_epsilon(g);
    SingularityTally tally;
    for (std::uint64_t p = 0; p < 200; ++p) {
        RandomStream s(2, p);
        const SamplePath B = simulate_bm(g, s);
        const IncreasingPath L = local_time_zero(B, eps);
        if (L.back() == 0.0) continue;
        std::vector<bool> ind(g.n_points());
        for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = std::abs(B[i]) <= eps;
        tally.add(mass_decomposition(L, ind, eps));
    }
    const SingularityReport r = tally.pooled();
    EXPECT_GE(r.mass_on_set, 0.95);
    EXPECT_LE(r.lebesgue_fraction(), 0.2);
}
