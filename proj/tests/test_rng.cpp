#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "complab/parallel.hpp"
#include "complab/rng.hpp"

using namespace complab;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
    const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RandomStream, SameTripleSameDraws) {
    RandomStream a(7, 123, 2);
    RandomStream b(7, 123, 2);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(RandomStream, StreamsAndSubstreamsDiffer) {
    RandomStream base(7, 5, 0);
    RandomStream other_path(7, 6, 0);
    RandomStream other_sub(7, 5, 1);
    RandomStream other_seed(8, 5, 0);
    const auto x = base.next_u64();
    EXPECT_NE(x, other_path.next_u64());
    EXPECT_NE(x, other_sub.next_u64());
    EXPECT_NE(x, other_seed.next_u64());
}

TEST(RandomStream, PathStreamIgnoresOtherPaths) {
    const RngSpec spec{99};
    RandomStream direct = spec.stream(1000);
    for (std::uint64_t p = 0; p < 50; ++p) {
        RandomStream s = spec.stream(p);
        s.normal();
    }
    RandomStream again = spec.stream(1000);
    EXPECT_EQ(direct.next_u64(), again.next_u64());
}

TEST(RandomStream, UniformOpenInterval) {
    RandomStream s(1, 1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomStream, NormalAndExponentialMoments) {
    RandomStream s(3, 0);
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0, e1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
        e1 += s.exponential();
    }
    EXPECT_NEAR(m1 / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(e1 / n, 1.0, 4.0 / std::sqrt(n));
}

TEST(ParallelFor, ResultsIndependentOfThreads) {
    const RngSpec spec{2024};
    auto run = [&](unsigned threads) {
        std::vector<double> out(5000);
        parallel_for(out.size(), threads, [&](std::size_t i) {
            RandomStream s = spec.stream(i);
            out[i] = s.normal() + s.uniform();
        });
        return out;
    };
    EXPECT_EQ(run(1), run(8));
}

TEST(ParallelFor, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t i) {
                                  if (i == 57) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}
