// Vectoring-mode CORDIC: rectangular to polar with shift-add iterations.
#pragma once

#include <cstdint>

namespace pmu {

struct PolarResult {
    double magnitude = 0.0;
    double phase = 0.0; // rad, [-pi, pi)
    bool degenerate = false;
};

// Double-precision model of the vectoring CORDIC. Quadrant pre-rotation,
// `iterations` shift-add steps, gain compensated by 1/K(iterations).
// Error vs hypot/atan2 is bounded by 2^-(iterations-2) (relative magnitude
// and absolute phase). (0,0) returns magnitude 0 / phase 0, flagged.
PolarResult cordic_to_polar(double re, double im, int iterations);

// Inverse of the CORDIC gain K(iterations) = prod sqrt(1 + 2^-2i).
double cordic_inverse_gain(int iterations);

// Integer datapath used by the fixed-point backend. Inputs are 32-bit
// accumulator values; magnitude keeps the input scale (gain already
// compensated), phase is Q3.29 radians.
struct PolarResultQ {
    int32_t magnitude = 0;
    int32_t phase_q29 = 0;
    bool degenerate = false;
};

PolarResultQ cordic_to_polar_q(int32_t re, int32_t im, int iterations);

constexpr double kPhaseQ29 = 536870912.0; // 2^29 counts per radian

} // namespace pmu
