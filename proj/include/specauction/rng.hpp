#pragma once

#include <cstdint>

namespace specauction {

// Splittable counter-based generator. Every stream is a SplitMix64 walk whose
// key is derived by hashing (parent key, tag), so a stream keyed by
// (seed, user, phase) is reproducible regardless of how many draws other
// streams consumed. Forking never aliases the parent stream.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(mix(seed ^ kStreamSalt)) {}

    // Derived stream for a tagged substream (trial index, user, phase, channel).
    Rng fork(uint64_t tag) const {
        return Rng(mix(state_ + kForkSalt) ^ mix(tag + kTagSalt), 0);
    }
    Rng fork(uint64_t tag_a, uint64_t tag_b) const { return fork(tag_a).fork(tag_b); }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        // Rejection-free would bias tiny ranges; n is small here, so reject.
        uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

  private:
    Rng(uint64_t raw_state, int) : state_(raw_state) {}

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    static constexpr uint64_t kStreamSalt = 0x6a09e667f3bcc908ULL;
    static constexpr uint64_t kForkSalt = 0xbb67ae8584caa73bULL;
    static constexpr uint64_t kTagSalt = 0x3c6ef372fe94f82bULL;

    uint64_t state_;
};

}  // namespace specauction
