// Windowed-sinc low-pass FIR design for the M-class phasor filter.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace pmu {

enum class FirWindow { Hamming, Hann, Rect };

// Symmetric low-pass taps, normalized to unity DC gain (sum == 1).
// dc_gain holds the raw coefficient sum before normalization.
struct FilterCoefficients {
    std::vector<double> taps;
    double dc_gain = 0.0;

    int order() const { return static_cast<int>(taps.size()) - 1; }
};

// Low-pass design used by the measurement-class reference estimator:
// sin(x)/x taps with cutoff 2*f_reference, shaped by `window`.
// order must be even; f_reference must stay below reporting_rate/2.
FilterCoefficients design_filter(int order, double fs, double f_reference,
                                 double reporting_rate,
                                 FirWindow window = FirWindow::Hamming);

// Complex frequency response of a symmetric tap set centered on tap order/2,
// evaluated at `freq` Hz for sample rate fs. Real-valued for symmetric taps.
std::complex<double> filter_response(const std::vector<double>& taps, double fs,
                                     double freq);

// Q1.15 image of the tap set for the fixed-point datapath. dc_sum is the
// exact integer coefficient sum; the estimator folds it into the output
// scaling so tap rounding does not bias the magnitude.
struct FixedFilterCoefficients {
    std::vector<int16_t> taps_q15;
    int32_t dc_sum = 0;
};

FixedFilterCoefficients quantize_filter(const FilterCoefficients& coeffs);

} // namespace pmu
