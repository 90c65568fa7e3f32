#pragma once

#include <cstdint>
#include <limits>

namespace needles {

/// Counter-based generator: a SplitMix64 sequence whose start is a hash of
/// (seed, a, b). Construction is a few multiplications, so every
/// (step, particle) pair can own a stream and results do not depend on the
/// order in which streams are consumed.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) : state_(mix(mix(mix(seed) ^ a) ^ b)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace needles
