#pragma once

#include <cmath>
#include <cstdint>

namespace scald {

// Deterministic xoshiro256** generator. The standard <random> engines are
// reproducible but the distributions are not pinned by the standard, so all
// draws used by the toolkit go through this class to keep output bit-identical
// for a given seed across compilers and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
        // splitmix64 expansion of the seed into the xoshiro state
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            s = z ^ (z >> 31);
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

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(mul_shift(next_u64(), span));
    }

    // Standard normal via Box-Muller; second value cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t mul_shift(std::uint64_t x, std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<__uint128_t>(x) * n) >> 64);
    }

    std::uint64_t state_[4]{};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// splitmix64 finalizer, used as the fixed hash for seed fan-out.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stable per-stream seed derivation: child k of a master seed.
// Documented contract: child_seed(master, k) = mix(master + (k+1) * golden).
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return mix_seed(master + (index + 1) * 0x9e3779b97f4a7c15ull);
}

} // namespace scald
