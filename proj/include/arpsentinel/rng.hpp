#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace arpsentinel {

// One splitmix64 step. Advances `state` and returns the next output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Sub-seed `index` of a master seed: the (index+1)-th output of the
// splitmix64 sequence started at `master`. Every seed used anywhere in a
// run is derived this way so one master seed pins the whole experiment.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= index; ++i) {
        out = splitmix64_next(state);
    }
    return out;
}

// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64. All
// randomness in the toolkit flows through this generator so that equal
// seeds give byte-identical artifacts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64_next(sm);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in {0, ..., n-1}. n must be nonzero. Plain modulo; the tiny
    // bias is irrelevant here and the mapping is trivial to reproduce in
    // other languages.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Poisson draw by Knuth's product-of-uniforms method. Fine for the
    // small per-tick means the simulator uses.
    std::uint64_t next_poisson(double mean) {
        if (mean <= 0.0) {
            return 0;
        }
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace arpsentinel
