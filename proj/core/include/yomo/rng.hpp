#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace yomo {

// Counter-based random stream built on the SplitMix64 finalizer. Streams are
// identified by a 64-bit key; substreams for (sample, repeat, trajectory, ...)
// style indexing come from derive(), so results are independent of evaluation
// order. Every stochastic operation in the library takes one of these
// explicitly; there is no ambient RNG anywhere.
class RngStream {
  public:
    explicit RngStream(uint64_t seed) : key_(mix(seed + kGolden)) {}

    // Child stream keyed by an index; derive(i) != derive(j) for i != j and
    // children are decorrelated from the parent sequence.
    RngStream derive(uint64_t index) const {
        return RngStream(mix(key_ ^ mix(index + kGolden)));
    }
    RngStream derive(std::initializer_list<uint64_t> path) const {
        RngStream s = *this;
        for (uint64_t p : path) s = s.derive(p);
        return s;
    }

    uint64_t next_u64() {
        counter_ += kGolden;
        return mix(key_ ^ counter_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire multiply-shift; bias is O(n / 2^64).
    uint64_t next_below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller; the spare value is cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

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
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace yomo
