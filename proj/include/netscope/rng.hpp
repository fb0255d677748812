#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace netscope {

// splitmix64 step; also used to absorb tags when deriving child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic child-seed derivation: absorb each tag into a splitmix64
/// chain. derive(s, a, b) != derive(s, b, a) and replicate r of an
/// experiment can be regenerated in isolation from (master, r).
inline std::uint64_t derive_seed(std::uint64_t master) {
    std::uint64_t s = master;
    return splitmix64(s);
}
template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, Tags... rest) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s) ^ (tag * 0xd6e8feb86659fd93ULL);
    return derive_seed(h, rest...);
}

// xoshiro256** with splitmix-seeded state. Distributions below are
// hand-rolled so that streams are identical across platforms and
// standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next() {
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

    /// Uniform double in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in {0,...,bound-1}, bound >= 1. Rejection sampling,
    /// so the result is exactly uniform.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    int range(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_{};
};

/// Fisher-Yates permutation of {0,...,n-1} drawn from rng.
inline std::vector<std::uint8_t> random_permutation(int n, Rng& rng) {
    std::vector<std::uint8_t> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
}

}  // namespace netscope
