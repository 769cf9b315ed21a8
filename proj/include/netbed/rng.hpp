#pragma once

#include <cstdint>

#include "netbed/net.hpp"

namespace netbed {

// splitmix64, used to expand a user seed into independent stream seeds.
// Keeping the generators self-contained (instead of <random>) guarantees
// identical traces across compilers and standard libraries.
inline u64 splitmix64(u64& state) {
    state += 0x9e3779b97f4a7c15ull;
    u64 z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// PCG32 (XSH RR variant). Small, fast, and stable output for a given
// (seed, stream) pair, which is all the traffic synthesis needs.
class Pcg32 {
public:
    Pcg32() : Pcg32(0x853c49e6748fea9bull, 0xda3e39cb94b95bdbull) {}

    Pcg32(u64 seed, u64 stream) {
        state_ = 0;
        inc_ = (stream << 1) | 1;
        next();
        state_ += seed;
        next();
    }

    u32 next() {
        u64 old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        u32 xorshifted = u32(((old >> 18) ^ old) >> 27);
        u32 rot = u32(old >> 59);
        return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31));
    }

    // Unbiased bounded draw via rejection sampling.
    u32 next_below(u32 bound) {
        if (bound <= 1) return 0;
        u32 threshold = (-bound) % bound;
        for (;;) {
            u32 r = next();
            if (r >= threshold) return r % bound;
        }
    }

    u64 next64() {
        return (u64(next()) << 32) | next();
    }

    // Uniform in [0, 1).
    double next_double() {
        return next() * (1.0 / 4294967296.0);
    }

private:
    u64 state_;
    u64 inc_;
};

// Derives a child generator from (seed, label). Used to give every attack
// window and helper its own stream so reordering one never shifts another.
inline Pcg32 derive_rng(u64 seed, u64 label) {
    u64 s = seed ^ (0x9e3779b97f4a7c15ull * (label + 1));
    u64 a = splitmix64(s);
    u64 b = splitmix64(s);
    return Pcg32(a, b);
}

} // namespace netbed
