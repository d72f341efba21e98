#pragma once

#include <cmath>
#include <cstdint>

#include "edarof/common.hpp"

// Deterministic, platform-stable random number generation. The generators
// are fixed-algorithm (documented constants below) rather than std::mt19937
// so that seeded artifacts - interleaver permutations, noise sequences,
// payload bits - are bit-identical across compilers and platforms.

namespace edarof {

// splitmix64 step (Steele, Lea, Flood 2014): mixes `state` and advances it.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream derivation: one master seed plus an index yields decorrelated
// per-task seeds, so concurrent sweep points never share a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (index * 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

// xorshift64* (Vigna 2016): shifts 12/25/27, multiplier 2685821657736338717.
// The raw seed is passed through splitmix64 so small seeds (0, 1, 2, ...)
// still start from well-mixed state.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed) {
        std::uint64_t s = seed;
        state_ = splitmix64(s);
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;  // all-zero state is absorbing
    }

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ULL;
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

// Box-Muller gaussian sampler. Each pair of outputs consumes exactly two
// generator draws, so sequences depend only on the seed and call count.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps log() finite without rejection (fixed draw count).
        const double u1 = 1.0 - rng_.next_double();
        const double u2 = rng_.next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    // Complex sample with E|z|^2 = 1 (each axis variance 1/2).
    cplx next_complex_unit() {
        const double re = next();
        const double im = next();
        return cplx(re, im) * 0.7071067811865476;
    }

private:
    Xorshift64Star rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace edarof
