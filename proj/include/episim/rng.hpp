#pragma once

#include <cstdint>

namespace episim {

// splitmix64 step (Steele, Lea, Flood 2014); used for seed expansion and
// stream derivation so that nearby seeds do not produce correlated states.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seeded, reproducible random stream backed by xoshiro256++ (Blackman &
/// Vigna). The generator algorithm is fixed here rather than taken from
/// <random> so that a given seed replays the same sequence on every
/// platform and standard library.
///
/// A stream must be confined to one worker at a time; there is no global
/// state and copies are independent from the moment of copying.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    /// The seed this stream was constructed from (stable under draws).
    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t seed_;
    std::uint64_t state_[4];
};

inline RngStream make_rng(std::uint64_t seed) { return RngStream(seed); }

/// Child stream fully determined by (base seed, index). Derivation mixes
/// the seed and index through splitmix64, so consuming draws from the base
/// does not change what its children look like.
inline RngStream derive_stream(const RngStream& base, std::uint64_t index) {
    std::uint64_t sm = base.seed() ^ (0xD1B54A32D192ED03ull * (index + 1));
    splitmix64_next(sm);
    return RngStream(splitmix64_next(sm));
}

} // namespace episim
