#pragma once

#include <cstdint>

namespace bilp {

/**
 * Splittable counter-based pseudo-random generator (splitmix64 core).
 *
 * Every random decision in the library flows through one of these, seeded
 * from a single user seed. split() derives an independent stream from a
 * stream id, so instance generation, presolve restarts and so on stay
 * reproducible independently of each other. Identical seeds give identical
 * sequences on every platform.
 */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    /// Derive an independent child stream for the given id.
    SplitMix64 split(std::uint64_t stream) {
        SplitMix64 mixer(state_ ^ (0x6a09e667f3bcc909ull + stream));
        std::uint64_t s = mixer.next_u64();
        return SplitMix64(s ^ stream * 0x9e3779b97f4a7c15ull);
    }

  private:
    std::uint64_t state_;
};

} // namespace bilp
