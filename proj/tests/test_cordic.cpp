#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pmu/cordic.hpp"

using namespace pmu;

namespace {

double wrap_diff(double a, double b) {
    return std::remainder(a - b, 2.0 * std::numbers::pi);
}

} // namespace

TEST_CASE("inverse gain constant") {
    // prod_{i<16} 1/sqrt(1+2^-2i); differs from the n->inf limit at 1e-10.
    CHECK(cordic_inverse_gain(16) == doctest::Approx(0.6072529351031393).epsilon(1e-12));
    CHECK(cordic_inverse_gain(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS(cordic_inverse_gain(0));
    CHECK_THROWS(cordic_inverse_gain(31));
}

TEST_CASE("axis and diagonal anchors") {
    const double tol = std::ldexp(1.0, -14);

    auto check_point = [&](double re, double im) {
        PolarResult r = cordic_to_polar(re, im, 16);
        CHECK(!r.degenerate);
        CHECK(std::abs(r.magnitude - std::hypot(re, im)) <= tol * std::hypot(re, im));
        CHECK(std::abs(wrap_diff(r.phase, std::atan2(im, re))) <= tol);
    };
    check_point(1.0, 0.0);
    check_point(0.0, 1.0);
    check_point(-1.0, 0.0);
    check_point(0.0, -1.0);
    check_point(1.0, 1.0);
    check_point(-0.7, -0.7);

    PolarResult zero = cordic_to_polar(0.0, 0.0, 16);
    CHECK(zero.degenerate);
    CHECK(zero.magnitude == 0.0);
}

TEST_CASE("phase lands in [-pi, pi)") {
    for (double ang = -3.1; ang < 3.2; ang += 0.05) {
        PolarResult r = cordic_to_polar(std::cos(ang), std::sin(ang), 16);
        CHECK(r.phase >= -std::numbers::pi);
        CHECK(r.phase < std::numbers::pi + 1e-12);
    }
}

TEST_CASE("error bound tracks the iteration count") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int iters : {4, 8, 12, 16}) {
        double bound = std::ldexp(1.0, -(iters - 2));
        double worst_mag = 0.0, worst_ph = 0.0;
        for (int n = 0; n < 2000; ++n) {
            double re = u(rng), im = u(rng);
            double mag = std::hypot(re, im);
            if (mag < 1e-6) continue;
            PolarResult r = cordic_to_polar(re, im, iters);
            worst_mag = std::max(worst_mag, std::abs(r.magnitude - mag) / mag);
            worst_ph = std::max(worst_ph, std::abs(wrap_diff(r.phase, std::atan2(im, re))));
        }
        CHECK(worst_mag <= bound);
        CHECK(worst_ph <= bound);
    }
}

TEST_CASE("16 iterations meet the 2^-14 budget over the unit disk") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double tol = std::ldexp(1.0, -14);
    double worst_mag = 0.0, worst_ph = 0.0;
    int tested = 0;
    while (tested < 100000) {
        double re = u(rng), im = u(rng);
        double mag = std::hypot(re, im);
        if (mag > 1.0 || mag == 0.0) continue;
        ++tested;
        PolarResult r = cordic_to_polar(re, im, 16);
        worst_mag = std::max(worst_mag, std::abs(r.magnitude - mag) / mag);
        worst_ph = std::max(worst_ph, std::abs(wrap_diff(r.phase, std::atan2(im, re))));
    }
    CHECK(worst_mag <= tol);
    CHECK(worst_ph <= tol);
}

TEST_CASE("integer datapath matches exact polar at accumulator scale") {
    std::mt19937_64 rng(13);
    // Accumulator outputs land in the upper decades of int32; shift
    // truncation noise is negligible there.
    std::uniform_real_distribution<double> mag_u(1 << 20, static_cast<double>(1 << 29));
    std::uniform_real_distribution<double> ang_u(-std::numbers::pi, std::numbers::pi);
    const double tol = std::ldexp(1.0, -13);

    double worst_mag = 0.0, worst_ph = 0.0;
    for (int n = 0; n < 20000; ++n) {
        double mag = mag_u(rng), ang = ang_u(rng);
        auto re = static_cast<int32_t>(std::lround(mag * std::cos(ang)));
        auto im = static_cast<int32_t>(std::lround(mag * std::sin(ang)));
        if (re == 0 && im == 0) continue;
        PolarResultQ r = cordic_to_polar_q(re, im, 16);
        double exact_mag = std::hypot(static_cast<double>(re), static_cast<double>(im));
        double exact_ph = std::atan2(static_cast<double>(im), static_cast<double>(re));
        worst_mag = std::max(worst_mag,
                             std::abs(r.magnitude - exact_mag) / exact_mag);
        worst_ph = std::max(worst_ph,
                            std::abs(wrap_diff(r.phase_q29 / kPhaseQ29, exact_ph)));
    }
    CHECK(worst_mag <= tol);
    CHECK(worst_ph <= tol);

    PolarResultQ zero = cordic_to_polar_q(0, 0, 16);
    CHECK(zero.degenerate);
}

TEST_CASE("integer phase covers all quadrants") {
    auto phase_of = [](int32_t re, int32_t im) {
        return cordic_to_polar_q(re, im, 16).phase_q29 / kPhaseQ29;
    };
    CHECK(phase_of(1 << 24, 1 << 24) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-4));
    CHECK(phase_of(-(1 << 24), 1 << 24) ==
          doctest::Approx(3 * std::numbers::pi / 4).epsilon(1e-4));
    CHECK(phase_of(-(1 << 24), -(1 << 24)) ==
          doctest::Approx(-3 * std::numbers::pi / 4).epsilon(1e-4));
    CHECK(phase_of(1 << 24, -(1 << 24)) ==
          doctest::Approx(-std::numbers::pi / 4).epsilon(1e-4));
}
