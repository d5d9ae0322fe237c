#pragma once

#include <cstdint>
#include <initializer_list>

namespace deephub {

/// Finalizer of the splitmix64 generator; used both as a bit mixer for
/// deriving independent seeds and to bootstrap Rng state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from (seed, key). Order-sensitive, so
/// mix_seed(mix_seed(s, a), b) differs from mix_seed(mix_seed(s, b), a).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + key + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    for (std::uint64_t k : keys)
        seed = mix_seed(seed, k);
    return seed;
}

/// xoshiro256** with a splitmix64-seeded state. Bit-stable across platforms,
/// which the determinism contracts rely on; std::mt19937 distributions are
/// implementation-defined and therefore avoided.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        for (auto& word : state_)
            word = splitmix64(seed += 0x9e3779b97f4a7c15ULL);
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

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Mask-and-reject, so unbiased for any n.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1)
            return 0;
        std::uint64_t mask = ~std::uint64_t{0};
        mask >>= __builtin_clzll(n - 1);
        std::uint64_t x;
        do {
            x = next_u64() & mask;
        } while (x >= n);
        return x;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace deephub
