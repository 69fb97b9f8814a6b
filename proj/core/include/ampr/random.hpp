#pragma once

#include <cstdint>
#include <limits>

namespace ampr {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Counter-based 64-bit generator: the k-th output is mix64(key + k * golden).
 *
 * A stream is identified by (seed, stream_id); there is no shared state, so
 * any stream can be reproduced independently of which thread consumes it.
 * Satisfies UniformRandomBitGenerator.
 */
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : key_(mix64(seed ^ mix64(stream_id + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(CounterRng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ampr
