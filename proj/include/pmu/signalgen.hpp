// Test waveform synthesis with closed-form ground truth, plus optional
// sensor front-end and ADC impairment models. Synthesis is deterministic
// and evaluates the continuous-time expressions at exact sample instants.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pmu/waveform.hpp"

namespace pmu {

enum class SignalKind {
    SteadyState,
    Harmonic,
    AmplitudeModulation,
    PhaseModulation,
    FrequencyRamp,
    OutOfBand,
    MagnitudeStep,
    PhaseStep,
};

const char* signal_kind_name(SignalKind kind);

struct TestSignalSpec {
    SignalKind kind = SignalKind::SteadyState;
    double f0 = 60.0;        // nominal, Hz
    double f1 = 60.0;        // fundamental under test, Hz
    double amplitude = 1.0;  // per-unit peak
    double phase0 = 0.0;     // rad at t = 0
    int harmonic_order = 2;  // 2..50
    double interference_level = 0.1; // fraction of nominal (harmonic / OOB)
    double interference_freq = 25.0; // Hz, out-of-band tone
    double fm = 1.0;         // modulation frequency, Hz
    double kx = 0.1;         // amplitude-modulation depth, per-unit
    double ka = 0.1;         // phase-modulation depth, rad
    double ramp_rate = 1.0;  // Hz/s
    double ramp_start = 55.0; // Hz, frequency held during lead-in
    double ramp_end = 65.0;   // Hz, held after the ramp completes
    double step_size = 0.1;  // per-unit (magnitude) or rad (phase)
    double step_time = 0.0;  // s, nominal step instant
    double step_stagger = 0.0;      // fraction of reporting interval, [0,1)
    double reporting_rate = 60.0;   // frames/s, scales step_stagger
    double duration = 7.0;   // s
    double lead_in = 2.0;    // s, settle time before evaluation

    // Effective step instant including the stagger offset.
    double step_instant() const { return step_time + step_stagger / reporting_rate; }

    void validate() const; // throws std::invalid_argument
};

// Closed-form reference trajectory. Phasor magnitudes are RMS (peak/sqrt 2);
// phase is relative to a nominal-frequency cosine anchored at t = 0.
struct GroundTruth {
    TestSignalSpec spec;

    std::complex<double> phasor(double t) const; // RMS per-unit
    double magnitude(double t) const;
    double phase(double t) const; // rad, unwrapped
    double frequency(double t) const;
    double rocof(double t) const;

    // Step instants (empty for continuous kinds); metrics exclude
    // the response window around each.
    std::vector<double> discontinuities() const;
};

struct SynthesisResult {
    SampledSignal signal;
    GroundTruth truth;
};

SynthesisResult synthesize(const TestSignalSpec& spec, double fs);

// Electric-field probe front end: the plate current is the time derivative
// of the field, so the voltage channel sees gain 2*pi*f*eps*A*R and a +pi/2
// phase lead. The current channel is a flat-gain Hall element. The optional
// third-order low-pass models the analog anti-alias stage.
struct SensorModel {
    double epsilon = 8.854e-12;       // F/m
    double plate_area = 1e-2;         // m^2
    double feedback_resistance = 20e6; // ohm
    double hall_sensitivity = 24.2;   // mT/V
    double lpf_cutoff = 100.0;        // Hz
    int lpf_order = 3;
};

// Central-difference derivative scaled by eps*A*R. Tone gain follows
// fs*sin(2*pi*f/fs)*eps*A*R, slightly below the continuous 2*pi*f value.
SampledSignal ddot_transfer(const SampledSignal& signal, const SensorModel& model);

// Bilinear-transformed Butterworth low-pass at model.lpf_cutoff.
SampledSignal sensor_lpf(const SampledSignal& signal, const SensorModel& model);

struct AdcModel {
    int resolution_bits = 16;
    int enob = 16;           // degraded mode: 8
    double full_scale = 3.3; // volts, total span

    void validate() const;
};

struct AdcResult {
    SampledSignal signal;
    uint32_t clipped = 0;
};

// Mid-tread quantization to resolution_bits plus zero-mean Gaussian noise
// sized so the measured SINAD of a full-scale sine matches the requested
// ENOB: sigma^2 = step(enob)^2/12 - step(bits)^2/12. Deterministic per seed.
AdcResult apply_adc(const SampledSignal& signal, const AdcModel& adc, uint64_t seed);

} // namespace pmu
