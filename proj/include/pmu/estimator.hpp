// M-class phasor estimation core: quadrature demodulation, interleaved
// decimating FIR, polar conversion, and frequency/ROCOF from phase
// differences. Two arithmetic backends share the same structure: Float
// (double precision reference) and Fixed (Q1.15 datapath with one
// 16x16->32 multiply per product and saturating 32-bit accumulation).
#pragma once

#include <complex>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "pmu/filter.hpp"
#include "pmu/waveform.hpp"

namespace pmu {

enum class Backend { Float, Fixed };

struct EstimatorConfig {
    double f_nominal = 60.0;
    double fs = 3840.0;
    double reporting_rate = 60.0; // frames per second
    int filter_order = 760;
    double f_reference = 7.54; // Hz, half the filter cutoff
    int cordic_iterations = 16;
    Backend backend = Backend::Float;
    FirWindow window = FirWindow::Hamming;
    bool fixed_truncate = true; // round-toward-zero after fixed multiplies

    int decimation() const { return static_cast<int>(fs / reporting_rate); }
    int lut_length() const { return static_cast<int>(fs / f_nominal); }
    double reporting_interval() const { return 1.0 / reporting_rate; }

    // Throws std::invalid_argument when the sample rate is not an integer
    // multiple of both the reporting rate and the nominal frequency, or the
    // filter parameters are out of range.
    void validate() const;
};

// One nominal cycle of cosine; sine read through a quarter-cycle offset.
struct QuadratureLut {
    std::vector<double> cos_values;
    std::vector<int16_t> cos_q15;
    int quarter = 0;

    static QuadratureLut make(int length);

    double cosine(int64_t k) const { return cos_values[static_cast<std::size_t>(k % cos_values.size())]; }
    double sine(int64_t k) const {
        int64_t L = static_cast<int64_t>(cos_values.size());
        return cos_values[static_cast<std::size_t>(((k % L) + L - quarter) % L)];
    }
    int16_t cosine_q15(int64_t k) const { return cos_q15[static_cast<std::size_t>(k % cos_q15.size())]; }
    int16_t sine_q15(int64_t k) const {
        int64_t L = static_cast<int64_t>(cos_q15.size());
        return cos_q15[static_cast<std::size_t>(((k % L) + L - quarter) % L)];
    }
};

// sample * (cos[k] - j sin[k]).
std::complex<double> demodulate(double sample, int64_t k, const QuadratureLut& lut);

struct PhasorFrame {
    int64_t index = 0;   // reporting index n
    double timestamp = 0; // window-center time, seconds
    double v_mag = 0;    // RMS, per-unit
    double v_phase = 0;  // rad, [-pi, pi)
    double i_mag = 0;
    double i_phase = 0;
    double frequency = 0; // Hz
    double rocof = 0;     // Hz/s
    uint32_t saturation_count = 0; // fixed-backend events since previous frame
};

// current + 2*pi*m closest to prev.
double unwrap_phase(double prev, double current_wrapped);

double wrap_phase(double phase); // into [-pi, pi)

struct FreqRocof {
    double frequency = 0;
    double rocof = 0;
};

// Standard finite differences over three consecutive unwrapped phases at
// the reporting interval dt:
//   f     = f_nominal + (phi_next - phi_prev) / (4*pi*dt)
//   rocof = (phi_next - 2*phi_mid + phi_prev) / (2*pi*dt^2)
FreqRocof frequency_rocof(double phi_prev, double phi_mid, double phi_next,
                          double f_nominal, double dt);

// Streaming demod + interleaved FIR, double precision. ceil((order+1)/dec)
// windows are open at any instant; each incoming demodulated sample feeds
// every open window at that window's age, so only the running sums persist.
// Window n covers samples [n*dec, n*dec+order] and completes when the last
// of them arrives.
class PhasorPipeline {
public:
    struct Output {
        int64_t n = 0;
        int64_t sample_index = 0; // k at which the window completed
        double timestamp = 0;     // t0 + (order/2 + n*dec)/fs
        std::complex<double> v;
        std::complex<double> i;
    };

    PhasorPipeline(const EstimatorConfig& cfg, const FilterCoefficients& coeffs,
                   double t0 = 0.0);

    std::optional<Output> push(double v_raw, double i_raw);
    int64_t sample_count() const { return k_; }

private:
    struct Window {
        int64_t start;
        double vr = 0, vi = 0, ir = 0, ii = 0;
    };

    const FilterCoefficients& coeffs_;
    QuadratureLut lut_;
    std::deque<Window> windows_;
    int64_t k_ = 0;
    int dec_;
    int order_;
    double fs_;
    double t0_;
};

// Same stream in the fixed-point datapath. Samples and LUT entries are
// Q1.15; the demodulated product is truncated back to Q1.15 (one stored
// sample per channel); each tap MAC is a single 16x16->32 multiply
// accumulated into saturating 32-bit sums.
class FixedPhasorPipeline {
public:
    struct Output {
        int64_t n = 0;
        int64_t sample_index = 0;
        double timestamp = 0;
        int32_t vr = 0, vi = 0, ir = 0, ii = 0;
        uint32_t saturations = 0; // events since the previous output
    };

    FixedPhasorPipeline(const EstimatorConfig& cfg,
                        const FixedFilterCoefficients& coeffs, double t0 = 0.0);

    std::optional<Output> push(double v_raw, double i_raw);
    uint64_t saturation_total() const { return sat_total_; }

private:
    struct Window {
        int64_t start;
        int32_t vr = 0, vi = 0, ir = 0, ii = 0;
    };

    const FixedFilterCoefficients& coeffs_;
    QuadratureLut lut_;
    std::deque<Window> windows_;
    int64_t k_ = 0;
    int dec_;
    int order_;
    double fs_;
    double t0_;
    bool truncate_;
    uint32_t sat_window_ = 0;
    uint64_t sat_total_ = 0;
};

// Full estimator: pipeline -> polar -> phase unwrap -> frequency/ROCOF.
// Frames carry the finite-difference frequency centered on their own index,
// so the stream lags the phasor pipeline by exactly one reporting interval
// and the first emitted frame is index 1.
class Estimator {
public:
    explicit Estimator(const EstimatorConfig& cfg, double t0 = 0.0);

    std::optional<PhasorFrame> process_sample(double v_raw, double i_raw);

    // Runs both channels through the stream; signals must share fs/t0/length.
    std::vector<PhasorFrame> process(const SampledSignal& v, const SampledSignal& i);

    const EstimatorConfig& config() const { return cfg_; }
    const FilterCoefficients& coefficients() const { return coeffs_; }
    uint64_t saturation_total() const;

private:
    struct Pending {
        int64_t n;
        double timestamp;
        double v_mag, v_phase, i_mag, i_phase;
        uint32_t saturations;
    };

    std::optional<PhasorFrame> ingest(int64_t n, double timestamp, double v_mag,
                                      double v_phase_wrapped, double i_mag,
                                      double i_phase_wrapped, uint32_t sats);

    EstimatorConfig cfg_;
    double t0_ = 0.0;
    FilterCoefficients coeffs_;
    FixedFilterCoefficients fixed_coeffs_;
    std::optional<PhasorPipeline> float_pipe_;
    std::optional<FixedPhasorPipeline> fixed_pipe_;
    double fixed_mag_scale_ = 0.0;
    std::vector<double> phase_ring_; // unwrapped voltage phases, most recent last
    std::optional<Pending> pending_;
};

// CSV: n,timestamp,v_mag,v_phase,i_mag,i_phase,freq,rocof,saturation_count
void write_frames_csv(const std::string& path, const std::vector<PhasorFrame>& frames);

} // namespace pmu
