#pragma once

#include <cmath>
#include <cstdint>

namespace teamlens {

// splitmix64: tiny, seed-stable across platforms. std::mt19937 distributions
// are not bit-reproducible between standard libraries, so synthetic fixtures
// use this instead.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_range(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    std::uint64_t next_below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    // Box-Muller, no cached spare: exactly two uniforms per call keeps the
    // stream position independent of caller history.
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace teamlens
