#pragma once

#include <cmath>
#include <cstdint>

namespace qsd {

// splitmix64 (Steele/Lea/Flood). Used to expand seeds and to derive
// per-task seeds from a master seed.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// xoshiro256** (Blackman/Vigna), state seeded with four successive
// splitmix64 outputs. Every randomized value in this repository (random
// coefficient vectors, noise draws, optimizer restarts) is defined in
// terms of this generator so that fixtures reproduce bit-for-bit in any
// implementation of the same algorithms.
//
// Derived values, in draw order:
//   next_u64()    raw 64-bit output
//   next_double() (next_u64() >> 11) * 2^-53, uniform in [0, 1)
//   next_normal() Box-Muller on two uniforms:
//                   u1 = (next_u64() >> 11 + 1) * 2^-53   in (0, 1]
//                   u2 = next_double()                    in [0, 1)
//                   r  = sqrt(-2 ln u1)
//                 returns r*cos(2 pi u2), caches r*sin(2 pi u2) and
//                 returns the cached value on the following call.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Fixed rule mapping (master seed, task index) to an independent stream
// seed. Campaign sets use index 0, 1, 2, ... in enumeration order, so
// results do not depend on execution schedule.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 sm(master + 0x9E3779B97F4A7C15ull * (index + 1));
    return sm.next();
}

}  // namespace qsd
