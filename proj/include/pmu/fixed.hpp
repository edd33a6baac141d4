// Q1.15 helpers mirroring a 16x16->32 multiplier / 32-bit adder fabric.
#pragma once

#include <cstdint>
#include <limits>

namespace pmu {

constexpr double kQ15 = 32768.0;

// Saturating conversions. Each records overflow through the counter the
// caller passes in; the hardware flags these the same way.
inline int16_t sat16(int32_t v, uint32_t& sat_count) {
    if (v > 32767) { ++sat_count; return 32767; }
    if (v < -32768) { ++sat_count; return -32768; }
    return static_cast<int16_t>(v);
}

inline int32_t sat_add32(int32_t a, int32_t b, uint32_t& sat_count) {
    int64_t s = static_cast<int64_t>(a) + b;
    if (s > std::numeric_limits<int32_t>::max()) { ++sat_count; return std::numeric_limits<int32_t>::max(); }
    if (s < std::numeric_limits<int32_t>::min()) { ++sat_count; return std::numeric_limits<int32_t>::min(); }
    return static_cast<int32_t>(s);
}

inline int16_t double_to_q15(double v, uint32_t& sat_count) {
    // Round half away from zero; -1.0 is exactly representable, +1.0 is not.
    double scaled = v * kQ15;
    if (scaled >= 32767.5) { ++sat_count; return 32767; }
    if (scaled <= -32768.5) { ++sat_count; return -32768; }
    return static_cast<int16_t>(scaled >= 0 ? scaled + 0.5 : scaled - 0.5);
}

// One 16x16->32 multiply. The full 32-bit product; callers shift as the
// datapath stage requires.
inline int32_t mul16(int16_t a, int16_t b) {
    return static_cast<int32_t>(a) * static_cast<int32_t>(b);
}

// Q30 -> Q15 renormalization after a multiply. Truncation is
// round-toward-zero (the datapath default); the alternative rounds to
// nearest, ties away from zero.
inline int16_t q30_to_q15(int32_t p, bool truncate, uint32_t& sat_count) {
    int32_t shifted;
    if (truncate) {
        shifted = p / 32768; // round toward zero, unlike >> on negatives
    } else {
        shifted = (p >= 0 ? p + 16384 : p - 16384) / 32768;
    }
    return sat16(shifted, sat_count);
}

} // namespace pmu
