#include "pmu/signalgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pmu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool finite(double v) { return std::isfinite(v); }

// Ramp segment boundaries: hold at ramp_start through the lead-in, sweep,
// then hold at ramp_end.
struct RampShape {
    double t_begin;
    double t_end;
    double span; // seconds spent sweeping

    static RampShape of(const TestSignalSpec& s) {
        double sweep = (s.ramp_end - s.ramp_start) / s.ramp_rate;
        return {s.lead_in, s.lead_in + sweep, sweep};
    }
};

} // namespace

const char* signal_kind_name(SignalKind kind) {
    switch (kind) {
        case SignalKind::SteadyState: return "steady_state";
        case SignalKind::Harmonic: return "harmonic";
        case SignalKind::AmplitudeModulation: return "mod_am";
        case SignalKind::PhaseModulation: return "mod_pm";
        case SignalKind::FrequencyRamp: return "ramp";
        case SignalKind::OutOfBand: return "oob";
        case SignalKind::MagnitudeStep: return "mag_step";
        case SignalKind::PhaseStep: return "phase_step";
    }
    return "unknown";
}

void TestSignalSpec::validate() const {
    require(finite(f0) && finite(f1) && finite(amplitude) && finite(phase0) &&
                finite(interference_level) && finite(interference_freq) && finite(fm) &&
                finite(kx) && finite(ka) && finite(ramp_rate) && finite(ramp_start) &&
                finite(ramp_end) && finite(step_size) && finite(step_time) &&
                finite(step_stagger) && finite(duration) && finite(lead_in) &&
                finite(reporting_rate),
            "non-finite signal parameter");
    require(f1 > 0, "f1 must be positive");
    require(f0 > 0, "f0 must be positive");
    require(amplitude > 0, "amplitude must be positive");
    require(duration > lead_in && lead_in >= 0, "need duration > lead_in >= 0");
    require(step_stagger >= 0 && step_stagger < 1, "step_stagger outside [0,1)");
    require(reporting_rate > 0, "reporting rate must be positive");
    if (kind == SignalKind::Harmonic)
        require(harmonic_order >= 2 && harmonic_order <= 50, "harmonic order outside 2..50");
    if (kind == SignalKind::AmplitudeModulation || kind == SignalKind::PhaseModulation)
        require(fm > 0, "modulation frequency must be positive");
    if (kind == SignalKind::FrequencyRamp) {
        require(ramp_rate != 0, "ramp rate must be nonzero");
        require((ramp_end - ramp_start) / ramp_rate >= 0, "ramp rate sign must match the sweep");
        require(ramp_start > 0 && ramp_end > 0, "ramp endpoints must be positive");
    }
    if (kind == SignalKind::OutOfBand)
        require(interference_freq > 0, "interference frequency must be positive");
    if (kind == SignalKind::MagnitudeStep || kind == SignalKind::PhaseStep)
        require(step_time >= 0, "step time must be nonnegative");
}

double GroundTruth::magnitude(double t) const {
    double peak = spec.amplitude;
    switch (spec.kind) {
        case SignalKind::AmplitudeModulation:
            peak *= 1.0 + spec.kx * std::cos(kTwoPi * spec.fm * t);
            break;
        case SignalKind::MagnitudeStep:
            if (t >= spec.step_instant()) peak *= 1.0 + spec.step_size;
            break;
        default:
            break;
    }
    return peak / std::numbers::sqrt2;
}

double GroundTruth::phase(double t) const {
    // Relative to the nominal-frequency cosine anchored at t = 0.
    switch (spec.kind) {
        case SignalKind::SteadyState:
        case SignalKind::Harmonic:
        case SignalKind::OutOfBand:
        case SignalKind::MagnitudeStep:
            return kTwoPi * (spec.f1 - spec.f0) * t + spec.phase0;
        case SignalKind::PhaseStep: {
            double p = kTwoPi * (spec.f1 - spec.f0) * t + spec.phase0;
            if (t >= spec.step_instant()) p += spec.step_size;
            return p;
        }
        case SignalKind::AmplitudeModulation:
            return spec.phase0;
        case SignalKind::PhaseModulation:
            return spec.phase0 + spec.ka * std::cos(kTwoPi * spec.fm * t);
        case SignalKind::FrequencyRamp: {
            RampShape r = RampShape::of(spec);
            double theta; // absolute carrier phase sans 2*pi*f0*t
            if (t < r.t_begin) {
                theta = kTwoPi * spec.ramp_start * t;
            } else if (t < r.t_end) {
                double u = t - r.t_begin;
                theta = kTwoPi * (spec.ramp_start * t + 0.5 * spec.ramp_rate * u * u);
            } else {
                double settled = kTwoPi * (spec.ramp_start * r.t_end +
                                           0.5 * spec.ramp_rate * r.span * r.span);
                theta = settled + kTwoPi * spec.ramp_end * (t - r.t_end);
            }
            return theta - kTwoPi * spec.f0 * t + spec.phase0;
        }
    }
    return spec.phase0;
}

double GroundTruth::frequency(double t) const {
    switch (spec.kind) {
        case SignalKind::PhaseModulation:
            return spec.f0 - spec.ka * spec.fm * std::sin(kTwoPi * spec.fm * t);
        case SignalKind::AmplitudeModulation:
            return spec.f0;
        case SignalKind::FrequencyRamp: {
            RampShape r = RampShape::of(spec);
            if (t < r.t_begin) return spec.ramp_start;
            if (t < r.t_end) return spec.ramp_start + spec.ramp_rate * (t - r.t_begin);
            return spec.ramp_end;
        }
        default:
            return spec.f1;
    }
}

double GroundTruth::rocof(double t) const {
    switch (spec.kind) {
        case SignalKind::PhaseModulation:
            return -kTwoPi * spec.ka * spec.fm * spec.fm * std::cos(kTwoPi * spec.fm * t);
        case SignalKind::FrequencyRamp: {
            RampShape r = RampShape::of(spec);
            return (t >= r.t_begin && t < r.t_end) ? spec.ramp_rate : 0.0;
        }
        default:
            return 0.0;
    }
}

std::complex<double> GroundTruth::phasor(double t) const {
    return std::polar(magnitude(t), phase(t));
}

std::vector<double> GroundTruth::discontinuities() const {
    if (spec.kind == SignalKind::MagnitudeStep || spec.kind == SignalKind::PhaseStep)
        return {spec.step_instant()};
    return {};
}

SynthesisResult synthesize(const TestSignalSpec& spec, double fs) {
    spec.validate();
    require(fs > 0 && finite(fs), "fs must be positive");
    double per = fs / spec.reporting_rate;
    require(std::abs(per - std::round(per)) < 1e-9 && per >= 1,
            "fs must be an integer multiple of the reporting rate");

    SynthesisResult out;
    out.truth.spec = spec;
    out.signal.fs = fs;
    out.signal.t0 = 0.0;
    auto count = static_cast<std::size_t>(std::llround(fs * spec.duration));
    out.signal.samples.resize(count);

    const GroundTruth& g = out.truth;
    for (std::size_t k = 0; k < count; ++k) {
        double t = static_cast<double>(k) / fs;
        double x = g.magnitude(t) * std::numbers::sqrt2 *
                   std::cos(g.phase(t) + kTwoPi * spec.f0 * t);
        if (spec.kind == SignalKind::Harmonic)
            x += spec.interference_level * spec.amplitude *
                 std::cos(kTwoPi * spec.harmonic_order * spec.f1 * t);
        else if (spec.kind == SignalKind::OutOfBand)
            x += spec.interference_level * spec.amplitude *
                 std::cos(kTwoPi * spec.interference_freq * t);
        out.signal.samples[k] = x;
    }
    return out;
}

SampledSignal ddot_transfer(const SampledSignal& signal, const SensorModel& model) {
    double gain = model.epsilon * model.plate_area * model.feedback_resistance;
    SampledSignal out;
    out.fs = signal.fs;
    out.t0 = signal.t0;
    std::size_t n = signal.samples.size();
    out.samples.resize(n);
    if (n < 2) {
        for (auto& s : out.samples) s = 0.0;
        return out;
    }
    const auto& x = signal.samples;
    // Central difference keeps the +pi/2 lead exact; one-sided at the ends.
    out.samples[0] = (x[1] - x[0]) * signal.fs * gain;
    for (std::size_t k = 1; k + 1 < n; ++k)
        out.samples[k] = (x[k + 1] - x[k - 1]) * 0.5 * signal.fs * gain;
    out.samples[n - 1] = (x[n - 1] - x[n - 2]) * signal.fs * gain;
    return out;
}

SampledSignal sensor_lpf(const SampledSignal& signal, const SensorModel& model) {
    require(model.lpf_order >= 1 && model.lpf_order <= 8, "lpf order out of range");
    require(model.lpf_cutoff > 0 && model.lpf_cutoff < signal.fs / 2,
            "lpf cutoff must stay below Nyquist");

    // Butterworth cascade via bilinear transform; c = cot(pi*fc/fs).
    double c = 1.0 / std::tan(std::numbers::pi * model.lpf_cutoff / signal.fs);
    struct Biquad {
        double b0, b1, b2, a1, a2;
        double s1 = 0, s2 = 0;
        double step(double in) {
            double out = b0 * in + s1;
            s1 = b1 * in - a1 * out + s2;
            s2 = b2 * in - a2 * out;
            return out;
        }
    };
    std::vector<Biquad> sections;
    int n = model.lpf_order;
    for (int k = 0; k < n / 2; ++k) {
        double q = 2.0 * std::sin(std::numbers::pi * (2 * k + 1) / (2.0 * n));
        double d = c * c + q * c + 1.0;
        sections.push_back({1.0 / d, 2.0 / d, 1.0 / d,
                            2.0 * (1.0 - c * c) / d, (c * c - q * c + 1.0) / d});
    }
    if (n % 2 == 1) {
        double d = c + 1.0;
        sections.push_back({1.0 / d, 1.0 / d, 0.0, (1.0 - c) / d, 0.0});
    }

    SampledSignal out;
    out.fs = signal.fs;
    out.t0 = signal.t0;
    out.samples.resize(signal.samples.size());
    for (std::size_t k = 0; k < signal.samples.size(); ++k) {
        double v = signal.samples[k];
        for (auto& s : sections) v = s.step(v);
        out.samples[k] = v;
    }
    return out;
}

void AdcModel::validate() const {
    require(resolution_bits >= 2 && resolution_bits <= 24, "resolution out of range");
    require(enob >= 1 && enob <= resolution_bits, "need 1 <= enob <= resolution_bits");
    require(full_scale > 0 && finite(full_scale), "full scale must be positive");
}

AdcResult apply_adc(const SampledSignal& signal, const AdcModel& adc, uint64_t seed) {
    adc.validate();
    double step = adc.full_scale / std::ldexp(1.0, adc.resolution_bits);
    double step_enob = adc.full_scale / std::ldexp(1.0, adc.enob);
    // Additive noise sized so noise + quantization power matches the
    // requested effective resolution.
    double sigma2 = (step_enob * step_enob - step * step) / 12.0;
    double sigma = sigma2 > 0 ? std::sqrt(sigma2) : 0.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma > 0 ? sigma : 1.0);

    long code_max = (1L << (adc.resolution_bits - 1)) - 1;
    long code_min = -(1L << (adc.resolution_bits - 1));

    AdcResult out;
    out.signal.fs = signal.fs;
    out.signal.t0 = signal.t0;
    out.signal.samples.resize(signal.samples.size());
    for (std::size_t k = 0; k < signal.samples.size(); ++k) {
        double v = signal.samples[k];
        if (sigma > 0) v += noise(rng);
        long code = std::lround(v / step);
        if (code > code_max) { code = code_max; ++out.clipped; }
        if (code < code_min) { code = code_min; ++out.clipped; }
        out.signal.samples[k] = static_cast<double>(code) * step;
    }
    return out;
}

} // namespace pmu
