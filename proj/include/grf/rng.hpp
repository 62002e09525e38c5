#pragma once

#include <cstdint>

namespace grf {

/// Counter-based deterministic generator. A generator is identified by a
/// 64-bit key; draws are a pure function of (key, counter), so the same seed
/// and call sequence produce the same values on every platform. fold() derives
/// an independent child stream from an index, which is how per-image,
/// per-iteration and per-correction streams are split without sharing state.
class Rng {
public:
    explicit Rng(uint64_t seed) : key_(mix(seed ^ 0x6A09E667F3BCC908ULL)) {}

    /// Child stream for a given index. Replayable: fold(i) on an unused or
    /// used generator always yields the same stream.
    Rng fold(uint64_t index) const {
        return Rng(mix(key_ ^ mix(index + 0xA0761D6478BD642FULL)), 0);
    }

    uint64_t next_u64() {
        return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
    }

    uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }

    /// Uniform in [0, 1) with 24 bits of mantissa.
    float next_float() {
        return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f;
    }

    /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    int uniform_int(int lo, int hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>((static_cast<uint64_t>(next_u32()) * span) >> 32);
    }

    bool bernoulli(float p) { return next_float() < p; }

private:
    Rng(uint64_t key, uint64_t counter) : key_(key), counter_(counter) {}

    // splitmix64 finalizer
    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    uint64_t key_;
    uint64_t counter_ = 0;
};

} // namespace grf
