#include "pmu/filter.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmu {

namespace {

double window_value(FirWindow window, int k, int order) {
    // Centered form; k runs -order/2..order/2.
    double c = std::cos(2.0 * std::numbers::pi * k / order);
    switch (window) {
        case FirWindow::Hamming: return 0.54 + 0.46 * c;
        case FirWindow::Hann: return 0.5 + 0.5 * c;
        case FirWindow::Rect: return 1.0;
    }
    return 1.0;
}

} // namespace

FilterCoefficients design_filter(int order, double fs, double f_reference,
                                 double reporting_rate, FirWindow window) {
    if (order <= 0 || order % 2 != 0)
        throw std::invalid_argument("filter order must be positive and even");
    if (fs <= 0 || f_reference <= 0)
        throw std::invalid_argument("fs and f_reference must be positive");
    double cutoff = 2.0 * f_reference;
    if (cutoff >= fs / 2)
        throw std::invalid_argument("filter cutoff must stay below Nyquist");
    if (reporting_rate > 0 && f_reference >= reporting_rate / 2)
        throw std::invalid_argument("f_reference must stay below half the reporting rate");

    int half = order / 2;
    FilterCoefficients out;
    out.taps.resize(static_cast<std::size_t>(order) + 1);
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        double x = 2.0 * std::numbers::pi * k * cutoff / fs;
        double sinc = k == 0 ? 1.0 : std::sin(x) / x;
        double tap = sinc * window_value(window, k, order);
        out.taps[static_cast<std::size_t>(k + half)] = tap;
        sum += tap;
    }
    out.dc_gain = sum;
    for (double& tap : out.taps) tap /= sum;
    return out;
}

std::complex<double> filter_response(const std::vector<double>& taps, double fs,
                                     double freq) {
    int center = (static_cast<int>(taps.size()) - 1) / 2;
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < taps.size(); ++m) {
        double angle = -2.0 * std::numbers::pi * freq *
                       (static_cast<int>(m) - center) / fs;
        acc += taps[m] * std::polar(1.0, angle);
    }
    return acc;
}

FixedFilterCoefficients quantize_filter(const FilterCoefficients& coeffs) {
    FixedFilterCoefficients out;
    out.taps_q15.reserve(coeffs.taps.size());
    for (double tap : coeffs.taps) {
        long q = std::lround(tap * 32768.0);
        if (q > 32767 || q < -32768)
            throw std::invalid_argument("tap exceeds Q1.15 range");
        out.taps_q15.push_back(static_cast<int16_t>(q));
        out.dc_sum += static_cast<int32_t>(q);
    }
    return out;
}

} // namespace pmu
