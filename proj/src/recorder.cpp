#include "pmu/recorder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace pmu {

namespace {

constexpr char kBlockMagic[8] = {'P', 'M', 'U', 'F', '0', '0', '0', '1'};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

uint16_t quantize_mag(double mag, double full_scale, bool& saturated) {
    if (mag < 0) mag = 0;
    long code = std::lround(mag / full_scale * 65535.0);
    if (code >= 65536 || mag >= full_scale) {
        saturated = true;
        return 65535;
    }
    return static_cast<uint16_t>(code);
}

uint16_t quantize_phase(double phase) {
    double w = std::remainder(phase, kTwoPi);
    if (w >= std::numbers::pi) w -= kTwoPi;
    auto code = static_cast<long>(std::floor((w + std::numbers::pi) / kTwoPi * 65536.0));
    if (code < 0) code = 0;
    if (code > 65535) code = 65535;
    return static_cast<uint16_t>(code);
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t get_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

} // namespace

QuantizeResult quantize(const PhasorFrame& frame, double mag_full_scale) {
    QuantizeResult out;
    out.frame.v_mag_q = quantize_mag(frame.v_mag, mag_full_scale, out.saturated);
    out.frame.i_mag_q = quantize_mag(frame.i_mag, mag_full_scale, out.saturated);
    out.frame.v_phase_q = quantize_phase(frame.v_phase);
    out.frame.i_phase_q = quantize_phase(frame.i_phase);
    return out;
}

PhasorFrame dequantize(const QuantizedFrame& q, double mag_full_scale) {
    PhasorFrame f;
    f.v_mag = q.v_mag_q / 65535.0 * mag_full_scale;
    f.i_mag = q.i_mag_q / 65535.0 * mag_full_scale;
    // Phase bins dequantize to centers.
    f.v_phase = (q.v_phase_q + 0.5) / 65536.0 * kTwoPi - std::numbers::pi;
    f.i_phase = (q.i_phase_q + 0.5) / 65536.0 * kTwoPi - std::numbers::pi;
    return f;
}

void encode_frame(const QuantizedFrame& q, uint8_t out[kFrameBytes]) {
    uint16_t words[4] = {q.v_mag_q, q.v_phase_q, q.i_mag_q, q.i_phase_q};
    for (int i = 0; i < 4; ++i) {
        out[2 * i] = static_cast<uint8_t>(words[i]);
        out[2 * i + 1] = static_cast<uint8_t>(words[i] >> 8);
    }
}

QuantizedFrame decode_frame(const uint8_t* bytes) {
    QuantizedFrame q;
    q.v_mag_q = get_u16(bytes);
    q.v_phase_q = get_u16(bytes + 2);
    q.i_mag_q = get_u16(bytes + 4);
    q.i_phase_q = get_u16(bytes + 6);
    return q;
}

RingBuffer::RingBuffer(std::size_t capacity_bytes, int frame_rate)
    : capacity_frames_(capacity_bytes / kFrameBytes), frame_rate_(frame_rate) {
    if (capacity_frames_ == 0) throw std::invalid_argument("capacity below one frame");
    if (frame_rate <= 0) throw std::invalid_argument("frame rate must be positive");
}

void RingBuffer::push(const QuantizedFrame& frame, int64_t frame_index) {
    if (frames_.size() == capacity_frames_) {
        frames_.pop_front();
        ++overwritten_;
    }
    frames_.push_back({frame, frame_index});
}

std::size_t RingBuffer::pop_frames(std::size_t n) {
    std::size_t popped = 0;
    while (popped < n && !frames_.empty()) {
        frames_.pop_front();
        ++popped;
    }
    return popped;
}

std::vector<uint8_t> RingBuffer::drain() {
    std::vector<uint8_t> out;
    std::size_t i = 0;
    while (i < frames_.size()) {
        int64_t second = frames_[i].index / frame_rate_;
        // One block per run of consecutive indices within a UTC second.
        std::size_t j = i + 1;
        while (j < frames_.size() && frames_[j].index == frames_[j - 1].index + 1 &&
               frames_[j].index / frame_rate_ == second)
            ++j;
        out.insert(out.end(), kBlockMagic, kBlockMagic + sizeof kBlockMagic);
        put_u32(out, static_cast<uint32_t>(second));
        put_u16(out, static_cast<uint16_t>(frames_[i].index % frame_rate_));
        put_u16(out, static_cast<uint16_t>(j - i));
        for (std::size_t k = i; k < j; ++k) {
            uint8_t bytes[kFrameBytes];
            encode_frame(frames_[k].frame, bytes);
            out.insert(out.end(), bytes, bytes + kFrameBytes);
        }
        i = j;
    }
    frames_.clear();
    return out;
}

std::vector<DecodedBlock> parse_blocks(const std::vector<uint8_t>& bytes) {
    std::vector<DecodedBlock> blocks;
    std::size_t i = 0;
    while (i < bytes.size()) {
        if (bytes.size() - i < 16) throw std::runtime_error("truncated block header");
        if (std::memcmp(bytes.data() + i, kBlockMagic, sizeof kBlockMagic) != 0)
            throw std::runtime_error("bad block magic");
        DecodedBlock block;
        block.utc_second = get_u32(bytes.data() + i + 8);
        block.start_index = get_u16(bytes.data() + i + 12);
        uint16_t count = get_u16(bytes.data() + i + 14);
        i += 16;
        if (bytes.size() - i < static_cast<std::size_t>(count) * kFrameBytes)
            throw std::runtime_error("truncated block payload");
        block.frames.reserve(count);
        for (uint16_t k = 0; k < count; ++k) {
            block.frames.push_back(decode_frame(bytes.data() + i));
            i += kFrameBytes;
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

void write_capture_csv(const std::string& path, const std::vector<DecodedBlock>& blocks,
                       double mag_full_scale, int frame_rate) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(10);
    out << "t,v_mag,v_phase,i_mag,i_phase\n";
    for (const DecodedBlock& block : blocks) {
        for (std::size_t k = 0; k < block.frames.size(); ++k) {
            double t = block.utc_second +
                       (block.start_index + static_cast<double>(k)) / frame_rate;
            PhasorFrame f = dequantize(block.frames[k], mag_full_scale);
            out << t << ',' << f.v_mag << ',' << f.v_phase << ',' << f.i_mag << ','
                << f.i_phase << '\n';
        }
    }
}

bool detect_event(const PhasorFrame& prev, const PhasorFrame& current,
                  const EventConfig& config, double f_nominal) {
    if (std::abs(current.v_mag - prev.v_mag) > config.mag_delta) return true;
    return std::abs(current.frequency - f_nominal) > config.freq_band;
}

ScheduleResult schedule_transmission(const DutyCycleConfig& config, double duration,
                                     double link_rate_bytes_per_s, int frame_rate,
                                     const std::vector<double>& event_times,
                                     std::size_t ring_capacity) {
    if (config.duty <= 0 || config.duty > 1)
        throw std::invalid_argument("duty must be in (0, 1]");
    if (duration <= 0 || link_rate_bytes_per_s <= 0)
        throw std::invalid_argument("duration and link rate must be positive");

    const double dt = 1.0 / frame_rate;
    const double frame_byte_rate = static_cast<double>(frame_rate) * kFrameBytes;
    const double wake_period = 5.0; // s between Continuous-mode radio wakes

    RingBuffer ring(ring_capacity, frame_rate);
    ScheduleResult out;
    out.overflow_risk = config.mode == TransmitMode::Continuous &&
                        link_rate_bytes_per_s * config.duty < frame_byte_rate;

    // Event-mode wake intervals: capture completes post_trigger after the
    // event, then the radio flushes pre+post frames.
    EventConfig events;
    std::vector<std::pair<double, double>> event_windows;
    for (double te : event_times) {
        double begin = te + events.post_trigger;
        double bytes = (events.pre_trigger + events.post_trigger) * frame_byte_rate;
        event_windows.emplace_back(begin, begin + bytes / link_rate_bytes_per_s);
    }

    auto total_ticks = static_cast<int64_t>(std::llround(duration * frame_rate));
    double awake_time = 0.0;
    double budget = 0.0; // link bytes available this tick
    bool was_awake = false;
    for (int64_t tick = 0; tick < total_ticks; ++tick) {
        double t = static_cast<double>(tick) * dt;
        QuantizedFrame f;
        f.v_mag_q = static_cast<uint16_t>(tick & 0xffff);
        ring.push(f, tick);

        bool awake = false;
        switch (config.mode) {
            case TransmitMode::Continuous: {
                double phase = std::fmod(t, wake_period);
                awake = phase < config.duty * wake_period;
                break;
            }
            case TransmitMode::EventRecorder:
                for (const auto& [b, e] : event_windows)
                    if (t >= b && t < e) { awake = true; break; }
                break;
            case TransmitMode::Immediate:
                awake = true;
                break;
        }

        if (awake) {
            awake_time += dt;
            budget += link_rate_bytes_per_s * dt;
            auto sendable = static_cast<std::size_t>(budget / kFrameBytes);
            std::size_t sent = ring.pop_frames(sendable);
            budget -= static_cast<double>(sent) * kFrameBytes;
            out.frames_sent += sent;
            if (!was_awake) out.windows.push_back({t, t + dt, sent * kFrameBytes});
            else {
                out.windows.back().t_end = t + dt;
                out.windows.back().bytes_sent += sent * kFrameBytes;
            }
        } else {
            budget = 0.0;
        }
        was_awake = awake;
    }

    out.effective_duty = awake_time / duration;
    out.frames_lost = ring.overwritten();
    if (out.frames_lost > 0) out.overflow_risk = true;
    return out;
}

} // namespace pmu
