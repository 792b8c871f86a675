#pragma once

#include <cmath>
#include <cstdint>

namespace teamlens {

// Session timebase: signed 64-bit nanoseconds relative to the manifest epoch.
// Device-clock timestamps become session time via a per-wearer constant offset.
using TimeNs = std::int64_t;

constexpr TimeNs kNsPerMs = 1'000'000;
constexpr TimeNs kNsPerSec = 1'000'000'000;

inline TimeNs ms_to_ns(double ms) { return static_cast<TimeNs>(std::llround(ms * 1e6)); }
inline TimeNs sec_to_ns(double s) { return static_cast<TimeNs>(std::llround(s * 1e9)); }
inline double ns_to_sec(TimeNs t) { return static_cast<double>(t) / 1e9; }
inline double ns_to_ms(TimeNs t) { return static_cast<double>(t) / 1e6; }

// Midpoint of two instants, rounded up. Used for event boundaries so that a
// boundary between samples a < b satisfies a < mid <= b.
inline TimeNs mid_ns(TimeNs a, TimeNs b) {
    return a + (b - a + 1) / 2;
}

} // namespace teamlens
