#pragma once

#include <cstdint>
#include <cmath>

namespace preflab {

// splitmix64; used both as a stream-derivation hash and as the state
// initializer for Rng.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent seed from a root seed and stream indices, so that
// parallel schedules cannot change which numbers a job sees.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    // Each index is folded in only after the state is fully mixed;
    // folding into an unmixed state lets nearby (a, b, c) tuples collide.
    std::uint64_t s = root;
    s = splitmix64(s) ^ (0x6a09e667f3bcc909ULL + a);
    s = splitmix64(s) ^ (0xbb67ae8584caa73bULL + b);
    s = splitmix64(s) ^ (0x3c6ef372fe94f82bULL + c);
    return splitmix64(s);
}

// xoshiro256** with hand-rolled distributions. std::mt19937 plus the
// standard distributions would not be portable across library
// implementations; everything here is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) {
            return (x << k) | (x >> (64 - k));
        };
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

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection-free Lemire reduction would be
    // biased for huge n; the multiply-shift here is fine for n << 2^32.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_[4];
};

}  // namespace preflab
