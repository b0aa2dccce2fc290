#pragma once

// Deterministic random streams for all simulations and samplers.
//
// Every consumer derives its own stream from a master seed and a stream key
// (tag + index) via a splitmix64-style mix, so runs are reproducible
// bit-for-bit no matter how work is split across threads: stream(seed, tag, i)
// is a pure function of its arguments. Uniform doubles are produced from the
// top 53 bits of the generator output, never through std::*_distribution
// (whose output is implementation-defined).

#include <array>
#include <cmath>
#include <cstdint>

namespace fitness_ifs {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256++ generator, seeded from a single 64-bit value.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = detail::splitmix64(s);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

private:
    std::array<std::uint64_t, 4> state_{};
};

/// Stream key derivation: independent sub-seed for (master, tag, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t s = master;
    std::uint64_t a = detail::splitmix64(s);
    s = a ^ (tag * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
    std::uint64_t b = detail::splitmix64(s);
    s = b ^ (index * 0xDA942042E4DD58B5ULL + 1);
    return detail::splitmix64(s);
}

inline Rng derive_stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    return Rng(derive_seed(master, tag, index));
}

// Stream tags used across the library. Values are arbitrary but fixed:
// changing them changes every seeded result.
inline constexpr std::uint64_t kTagEnvironment = 1;
inline constexpr std::uint64_t kTagSite = 2;
inline constexpr std::uint64_t kTagSample = 3;
inline constexpr std::uint64_t kTagRun = 4;

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double prob_one) {
    return uniform01(rng) < prob_one;
}

/// Geometric on {1, 2, ...} with success probability `success`:
/// P(G = g) = (1-success)^(g-1) * success. Sampled by inversion.
inline std::uint64_t geometric1(Rng& rng, double success) {
    const double fail = 1.0 - success;
    if (fail <= 0.0) return 1;
    const double log_fail = std::log(fail);
    // 1-U is in (0, 1]; U' == 1 maps to G = 1.
    const double g = std::floor(std::log1p(-uniform01(rng)) / log_fail) + 1.0;
    return g < 1.0 ? 1 : static_cast<std::uint64_t>(g);
}

}  // namespace fitness_ifs
