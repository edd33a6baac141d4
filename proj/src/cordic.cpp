#include "pmu/cordic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmu {

namespace {

constexpr int kMaxIterations = 30;

void check_iterations(int iterations) {
    if (iterations < 1 || iterations > kMaxIterations)
        throw std::invalid_argument("cordic iterations out of range");
}

constexpr int32_t kPiQ29 = 1686629713;     // round(pi * 2^29)
constexpr int32_t kHalfPiQ29 = 843314857;  // round(pi/2 * 2^29)

} // namespace

double cordic_inverse_gain(int iterations) {
    check_iterations(iterations);
    double k = 1.0;
    for (int i = 0; i < iterations; ++i) k *= std::sqrt(1.0 + std::ldexp(1.0, -2 * i));
    return 1.0 / k;
}

PolarResult cordic_to_polar(double re, double im, int iterations) {
    check_iterations(iterations);
    if (re == 0.0 && im == 0.0) return {0.0, 0.0, true};

    double x = re, y = im, z = 0.0;
    if (x < 0.0) {
        // Pre-rotate by -+pi/2 so the residual angle fits the iteration range.
        if (y >= 0.0) {
            double t = x;
            x = y;
            y = -t;
            z = std::numbers::pi / 2;
        } else {
            double t = x;
            x = -y;
            y = t;
            z = -std::numbers::pi / 2;
        }
    }
    for (int i = 0; i < iterations; ++i) {
        double dx = std::ldexp(x, -i);
        double dy = std::ldexp(y, -i);
        double step = std::atan(std::ldexp(1.0, -i));
        if (y >= 0.0) {
            x += dy;
            y -= dx;
            z += step;
        } else {
            x -= dy;
            y += dx;
            z -= step;
        }
    }
    if (z >= std::numbers::pi) z -= 2.0 * std::numbers::pi;
    return {x * cordic_inverse_gain(iterations), z, false};
}

PolarResultQ cordic_to_polar_q(int32_t re, int32_t im, int iterations) {
    check_iterations(iterations);
    if (re == 0 && im == 0) return {0, 0, true};

    // 64-bit working registers stand in for the datapath's guard bits.
    int64_t x = re, y = im;
    int32_t z = 0;
    if (x < 0) {
        if (y >= 0) {
            int64_t t = x;
            x = y;
            y = -t;
            z = kHalfPiQ29;
        } else {
            int64_t t = x;
            x = -y;
            y = t;
            z = -kHalfPiQ29;
        }
    }
    for (int i = 0; i < iterations; ++i) {
        int64_t dx = x >> i;
        int64_t dy = y >> i;
        int32_t step = static_cast<int32_t>(
            std::llround(std::atan(std::ldexp(1.0, -i)) * kPhaseQ29));
        if (y >= 0) {
            x += dy;
            y -= dx;
            z += step;
        } else {
            x -= dy;
            y += dx;
            z -= step;
        }
    }
    if (z >= kPiQ29) z = static_cast<int32_t>(z - 2LL * kPiQ29);

    double mag = static_cast<double>(x) * cordic_inverse_gain(iterations);
    int64_t rounded = std::llround(mag);
    if (rounded > INT32_MAX) rounded = INT32_MAX;
    if (rounded < INT32_MIN) rounded = INT32_MIN;
    return {static_cast<int32_t>(rounded), z, false};
}

} // namespace pmu
