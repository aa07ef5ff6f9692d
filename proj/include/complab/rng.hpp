#pragma once

#include <array>
#include <cstdint>

namespace complab {

/// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key);
};

/// Sequential draws from one Philox stream.
///
/// The counter holds (draw index: 48 bits, substream: 16 bits, stream id: 64 bits)
/// and the key is the master seed, so a stream is a pure function of
/// (master_seed, stream_id, substream) and never depends on other streams.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint16_t substream = 0);

    std::uint64_t next_u64();

    /// Uniform on (0, 1): 53-bit mantissa, never exactly 0 or 1.
    double uniform();

    /// Standard normal via the Marsaglia polar method.
    double normal();

    /// Exponential with mean 1.
    double exponential();

private:
    void refill();

    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint16_t substream_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Counter buffer_{};
    int buffered_words_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Master seed plus the path-index -> stream derivation rule.
struct RngSpec {
    std::uint64_t master_seed = 0;

    RandomStream stream(std::uint64_t path_index, std::uint16_t substream = 0) const {
        return RandomStream(master_seed, path_index, substream);
    }
};

}  // namespace complab
