#include "pmu/estimator.hpp"

#include <cassert>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "pmu/cordic.hpp"
#include "pmu/fixed.hpp"

namespace pmu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int window_slots(int order, int dec) { return (order + 1 + dec - 1) / dec; }

} // namespace

void EstimatorConfig::validate() const {
    if (fs <= 0 || f_nominal <= 0 || reporting_rate <= 0)
        throw std::invalid_argument("rates must be positive");
    double dec = fs / reporting_rate;
    if (std::abs(dec - std::round(dec)) > 1e-9 || dec < 1)
        throw std::invalid_argument("fs must be an integer multiple of reporting_rate");
    double lut = fs / f_nominal;
    if (std::abs(lut - std::round(lut)) > 1e-9 || lut < 4 ||
        std::llround(lut) % 4 != 0)
        throw std::invalid_argument("fs must be a multiple of 4*f_nominal for the quadrature table");
    if (filter_order <= 0 || filter_order % 2 != 0)
        throw std::invalid_argument("filter order must be positive and even");
    if (f_reference <= 0 || f_reference >= reporting_rate / 2)
        throw std::invalid_argument("f_reference must sit below half the reporting rate");
    if (cordic_iterations < 1 || cordic_iterations > 30)
        throw std::invalid_argument("cordic iterations out of range");
}

QuadratureLut QuadratureLut::make(int length) {
    if (length < 4 || length % 4 != 0)
        throw std::invalid_argument("lut length must be a positive multiple of 4");
    QuadratureLut lut;
    lut.quarter = length / 4;
    lut.cos_values.resize(static_cast<std::size_t>(length));
    lut.cos_q15.resize(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
        double c = std::cos(kTwoPi * i / length);
        lut.cos_values[static_cast<std::size_t>(i)] = c;
        // Scale 32767 keeps +-1 representable; the uniform 32767/32768 gain
        // is compensated in the output scaling.
        lut.cos_q15[static_cast<std::size_t>(i)] =
            static_cast<int16_t>(std::lround(c * 32767.0));
    }
    return lut;
}

std::complex<double> demodulate(double sample, int64_t k, const QuadratureLut& lut) {
    return {sample * lut.cosine(k), -sample * lut.sine(k)};
}

double wrap_phase(double phase) {
    double w = std::remainder(phase, kTwoPi);
    if (w >= std::numbers::pi) w -= kTwoPi; // remainder can return +pi
    return w;
}

double unwrap_phase(double prev, double current_wrapped) {
    return current_wrapped - kTwoPi * std::round((current_wrapped - prev) / kTwoPi);
}

FreqRocof frequency_rocof(double phi_prev, double phi_mid, double phi_next,
                          double f_nominal, double dt) {
    FreqRocof out;
    out.frequency = f_nominal + (phi_next - phi_prev) / (4.0 * std::numbers::pi * dt);
    out.rocof = (phi_next - 2.0 * phi_mid + phi_prev) / (kTwoPi * dt * dt);
    return out;
}

PhasorPipeline::PhasorPipeline(const EstimatorConfig& cfg,
                               const FilterCoefficients& coeffs, double t0)
    : coeffs_(coeffs),
      lut_(QuadratureLut::make(cfg.lut_length())),
      dec_(cfg.decimation()),
      order_(cfg.filter_order),
      fs_(cfg.fs),
      t0_(t0) {
    if (coeffs.order() != cfg.filter_order)
        throw std::invalid_argument("coefficient count does not match the configured order");
}

std::optional<PhasorPipeline::Output> PhasorPipeline::push(double v_raw, double i_raw) {
    if (k_ % dec_ == 0) windows_.push_back({k_});
    assert(static_cast<int>(windows_.size()) <= window_slots(order_, dec_));

    double dvr = v_raw * lut_.cosine(k_);
    double dvi = -v_raw * lut_.sine(k_);
    double dir = i_raw * lut_.cosine(k_);
    double dii = -i_raw * lut_.sine(k_);

    for (Window& w : windows_) {
        double tap = coeffs_.taps[static_cast<std::size_t>(k_ - w.start)];
        w.vr += dvr * tap;
        w.vi += dvi * tap;
        w.ir += dir * tap;
        w.ii += dii * tap;
    }

    std::optional<Output> out;
    const Window& front = windows_.front();
    if (k_ - front.start == order_) {
        int64_t n = front.start / dec_;
        out = Output{n, k_, t0_ + (order_ / 2.0 + static_cast<double>(n) * dec_) / fs_,
                     {front.vr, front.vi}, {front.ir, front.ii}};
        windows_.pop_front();
    }
    ++k_;
    return out;
}

FixedPhasorPipeline::FixedPhasorPipeline(const EstimatorConfig& cfg,
                                         const FixedFilterCoefficients& coeffs,
                                         double t0)
    : coeffs_(coeffs),
      lut_(QuadratureLut::make(cfg.lut_length())),
      dec_(cfg.decimation()),
      order_(cfg.filter_order),
      fs_(cfg.fs),
      t0_(t0),
      truncate_(cfg.fixed_truncate) {
    if (static_cast<int>(coeffs.taps_q15.size()) != cfg.filter_order + 1)
        throw std::invalid_argument("coefficient count does not match the configured order");
}

std::optional<FixedPhasorPipeline::Output> FixedPhasorPipeline::push(double v_raw,
                                                                     double i_raw) {
    if (k_ % dec_ == 0) windows_.push_back({k_});

    uint32_t sat = 0;
    int16_t v_q = double_to_q15(v_raw, sat);
    int16_t i_q = double_to_q15(i_raw, sat);
    int16_t c_q = lut_.cosine_q15(k_);
    // The sine table is read negated; |entries| <= 32767 so this is safe.
    auto ns_q = static_cast<int16_t>(-lut_.sine_q15(k_));

    // Demodulation multiply renormalizes to Q1.15: one stored sample per
    // channel component, exactly as the single-sample store requires.
    int16_t dvr = q30_to_q15(mul16(v_q, c_q), truncate_, sat);
    int16_t dvi = q30_to_q15(mul16(v_q, ns_q), truncate_, sat);
    int16_t dir = q30_to_q15(mul16(i_q, c_q), truncate_, sat);
    int16_t dii = q30_to_q15(mul16(i_q, ns_q), truncate_, sat);

    for (Window& w : windows_) {
        // Each MAC is one 16x16->32 multiply whose full product feeds the
        // 32-bit saturating adder; no width reduction happens here.
        int16_t tap = coeffs_.taps_q15[static_cast<std::size_t>(k_ - w.start)];
        w.vr = sat_add32(w.vr, mul16(dvr, tap), sat);
        w.vi = sat_add32(w.vi, mul16(dvi, tap), sat);
        w.ir = sat_add32(w.ir, mul16(dir, tap), sat);
        w.ii = sat_add32(w.ii, mul16(dii, tap), sat);
    }
    sat_window_ += sat;
    sat_total_ += sat;

    std::optional<Output> out;
    const Window& front = windows_.front();
    if (k_ - front.start == order_) {
        int64_t n = front.start / dec_;
        out = Output{n, k_, t0_ + (order_ / 2.0 + static_cast<double>(n) * dec_) / fs_,
                     front.vr, front.vi, front.ir, front.ii, sat_window_};
        sat_window_ = 0;
        windows_.pop_front();
    }
    ++k_;
    return out;
}

Estimator::Estimator(const EstimatorConfig& cfg, double t0) : cfg_(cfg), t0_(t0) {
    cfg_.validate();
    coeffs_ = design_filter(cfg_.filter_order, cfg_.fs, cfg_.f_reference,
                            cfg_.reporting_rate, cfg_.window);
    if (cfg_.backend == Backend::Float) {
        float_pipe_.emplace(cfg_, coeffs_, t0);
    } else {
        fixed_coeffs_ = quantize_filter(coeffs_);
        fixed_pipe_.emplace(cfg_, fixed_coeffs_, t0);
        // Output conversion undoing, in order: demod halving (x2), RMS
        // (1/sqrt 2), the 32767/32768 table gain, the Q15 sample scale, and
        // the exact integer tap sum.
        fixed_mag_scale_ = std::numbers::sqrt2 * (32768.0 / 32767.0) /
                           (32768.0 * static_cast<double>(fixed_coeffs_.dc_sum));
    }
}

uint64_t Estimator::saturation_total() const {
    return fixed_pipe_ ? fixed_pipe_->saturation_total() : 0;
}

std::optional<PhasorFrame> Estimator::ingest(int64_t n, double timestamp, double v_mag,
                                             double v_phase_wrapped, double i_mag,
                                             double i_phase_wrapped, uint32_t sats) {
    double unwrapped = phase_ring_.empty()
                           ? v_phase_wrapped
                           : unwrap_phase(phase_ring_.back(), v_phase_wrapped);
    phase_ring_.push_back(unwrapped);
    if (phase_ring_.size() > 5) phase_ring_.erase(phase_ring_.begin());

    std::optional<PhasorFrame> frame;
    if (pending_ && phase_ring_.size() >= 3) {
        std::size_t last = phase_ring_.size() - 1;
        FreqRocof fr = frequency_rocof(phase_ring_[last - 2], phase_ring_[last - 1],
                                       phase_ring_[last], cfg_.f_nominal,
                                       cfg_.reporting_interval());
        frame = PhasorFrame{pending_->n, pending_->timestamp, pending_->v_mag,
                            pending_->v_phase, pending_->i_mag, pending_->i_phase,
                            fr.frequency, fr.rocof, pending_->saturations};
    }
    pending_ = Pending{n, timestamp, v_mag, v_phase_wrapped, i_mag, i_phase_wrapped, sats};
    return frame;
}

std::optional<PhasorFrame> Estimator::process_sample(double v_raw, double i_raw) {
    if (float_pipe_) {
        auto out = float_pipe_->push(v_raw, i_raw);
        if (!out) return std::nullopt;
        double v_mag = std::hypot(out->v.real(), out->v.imag()) * std::numbers::sqrt2;
        double i_mag = std::hypot(out->i.real(), out->i.imag()) * std::numbers::sqrt2;
        double v_ph = std::atan2(out->v.imag(), out->v.real());
        double i_ph = std::atan2(out->i.imag(), out->i.real());
        return ingest(out->n, out->timestamp, v_mag, wrap_phase(v_ph), i_mag,
                      wrap_phase(i_ph), 0);
    }
    auto out = fixed_pipe_->push(v_raw, i_raw);
    if (!out) return std::nullopt;
    PolarResultQ v = cordic_to_polar_q(out->vr, out->vi, cfg_.cordic_iterations);
    PolarResultQ i = cordic_to_polar_q(out->ir, out->ii, cfg_.cordic_iterations);
    return ingest(out->n, out->timestamp, v.magnitude * fixed_mag_scale_,
                  wrap_phase(v.phase_q29 / kPhaseQ29),
                  i.magnitude * fixed_mag_scale_,
                  wrap_phase(i.phase_q29 / kPhaseQ29), out->saturations);
}

std::vector<PhasorFrame> Estimator::process(const SampledSignal& v,
                                            const SampledSignal& i) {
    if (v.samples.size() != i.samples.size() || v.fs != i.fs || v.t0 != i.t0)
        throw std::invalid_argument("channel signals must share fs, t0 and length");
    if (v.fs != cfg_.fs)
        throw std::invalid_argument("signal rate does not match the estimator");
    if (v.t0 != t0_)
        throw std::invalid_argument("signal t0 does not match the estimator start time");
    std::vector<PhasorFrame> frames;
    frames.reserve(v.samples.size() / static_cast<std::size_t>(cfg_.decimation()) + 1);
    for (std::size_t k = 0; k < v.samples.size(); ++k) {
        auto frame = process_sample(v.samples[k], i.samples[k]);
        if (frame) frames.push_back(*frame);
    }
    return frames;
}

void write_frames_csv(const std::string& path, const std::vector<PhasorFrame>& frames) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(12);
    out << "n,timestamp,v_mag,v_phase,i_mag,i_phase,freq,rocof,saturation_count\n";
    for (const PhasorFrame& f : frames)
        out << f.index << ',' << f.timestamp << ',' << f.v_mag << ',' << f.v_phase
            << ',' << f.i_mag << ',' << f.i_phase << ',' << f.frequency << ','
            << f.rocof << ',' << f.saturation_count << '\n';
}

} // namespace pmu
