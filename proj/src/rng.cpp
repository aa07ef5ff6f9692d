#include "complab/rng.hpp"

#include <cmath>

namespace complab {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, ctr[0], lo0, hi0);
        mulhilo(kMulB, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint16_t substream)
    : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
      stream_id_(stream_id),
      substream_(substream) {}

void RandomStream::refill() {
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(block_index_),
        static_cast<std::uint32_t>((block_index_ >> 32) & 0xFFFFu) | (static_cast<std::uint32_t>(substream_) << 16),
        static_cast<std::uint32_t>(stream_id_),
        static_cast<std::uint32_t>(stream_id_ >> 32),
    };
    buffer_ = Philox4x32::block(ctr, key_);
    ++block_index_;
    buffered_words_ = 4;
}

std::uint64_t RandomStream::next_u64() {
    if (buffered_words_ < 2) {
        refill();
    }
    const int base = 4 - buffered_words_;
    buffered_words_ -= 2;
    return (static_cast<std::uint64_t>(buffer_[base + 1]) << 32) | buffer_[base];
}

double RandomStream::uniform() {
    // (k + 0.5) / 2^53 keeps the result strictly inside (0, 1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

double RandomStream::exponential() {
    return -std::log(uniform());
}

}  // namespace complab
