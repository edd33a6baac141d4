// Phasor buffering and reporting path: 16-bit quantized frames in a 128-kB
// ring, event-triggered capture, and a duty-cycled transmission scheduler.
// Frames carry no timestamps; block headers synthesized at drain time carry
// the UTC second and start index, which is what lets 131072 bytes hold
// better than 270 s at 60 fps.
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "pmu/estimator.hpp"

namespace pmu {

constexpr std::size_t kFrameBytes = 8;
constexpr double kMagFullScale = 2.0; // per-unit

struct QuantizedFrame {
    uint16_t v_mag_q = 0;
    uint16_t v_phase_q = 0;
    uint16_t i_mag_q = 0;
    uint16_t i_phase_q = 0;
};

struct QuantizeResult {
    QuantizedFrame frame;
    bool saturated = false; // magnitude at or above full scale
};

// mag: round(mag/full_scale * 65535), saturating. phase: [-pi, pi) linear
// onto 0..65535.
QuantizeResult quantize(const PhasorFrame& frame, double mag_full_scale = kMagFullScale);

// Inverse mapping to bin centers; only magnitudes and phases are
// reconstructed, other fields zero.
PhasorFrame dequantize(const QuantizedFrame& q, double mag_full_scale = kMagFullScale);

void encode_frame(const QuantizedFrame& q, uint8_t out[kFrameBytes]);
QuantizedFrame decode_frame(const uint8_t* bytes);

// Overwrite-oldest ring of 8-byte frames. Capacity accounting covers
// payload bytes only.
class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity_bytes = 131072, int frame_rate = 60);

    void push(const QuantizedFrame& frame, int64_t frame_index);

    std::size_t frame_count() const { return frames_.size(); }
    std::size_t capacity_frames() const { return capacity_frames_; }
    uint64_t overwritten() const { return overwritten_; }
    std::size_t pending_bytes() const { return frames_.size() * kFrameBytes; }

    // Block-framed byte stream (header per run of frames within one UTC
    // second: magic "PMUF0001", u32 second, u16 start index, u16 count,
    // little-endian), oldest first. Empties the buffer.
    std::vector<uint8_t> drain();

    // Removes up to n oldest frames (partial drain for the transmission
    // scheduler); returns how many were removed.
    std::size_t pop_frames(std::size_t n);

private:
    struct Slot {
        QuantizedFrame frame;
        int64_t index;
    };

    std::deque<Slot> frames_;
    std::size_t capacity_frames_;
    int frame_rate_;
    uint64_t overwritten_ = 0;
};

struct DecodedBlock {
    uint32_t utc_second = 0;
    uint16_t start_index = 0; // frame index within the second
    std::vector<QuantizedFrame> frames;
};

// Throws std::runtime_error on bad magic or truncation.
std::vector<DecodedBlock> parse_blocks(const std::vector<uint8_t>& bytes);

// t,v_mag,v_phase,i_mag,i_phase with t reconstructed from block headers.
void write_capture_csv(const std::string& path, const std::vector<DecodedBlock>& blocks,
                       double mag_full_scale = kMagFullScale, int frame_rate = 60);

struct EventConfig {
    double mag_delta = 0.1;  // per-unit jump between consecutive frames
    double freq_band = 0.5;  // Hz deviation from nominal
    double pre_trigger = 1.0;  // s of history kept before the trigger
    double post_trigger = 4.0; // s recorded after
};

bool detect_event(const PhasorFrame& prev, const PhasorFrame& current,
                  const EventConfig& config, double f_nominal);

enum class TransmitMode { Continuous, EventRecorder, Immediate };

struct DutyCycleConfig {
    double duty = 0.18; // awake fraction, (0, 1]
    TransmitMode mode = TransmitMode::Continuous;
};

struct TransmitWindow {
    double t_begin = 0;
    double t_end = 0;
    uint64_t bytes_sent = 0;
};

struct ScheduleResult {
    std::vector<TransmitWindow> windows;
    double effective_duty = 0;
    bool overflow_risk = false; // link_rate * duty below the frame byte rate
    uint64_t frames_lost = 0;   // ring overwrites during the simulation
    uint64_t frames_sent = 0;
};

// Discrete-event simulation over `duration` seconds of a 60-fps frame
// stream feeding the ring. Continuous mode wakes the radio for duty-sized
// windows on a fixed cadence; EventRecorder wakes only after event_times;
// Immediate forwards each frame as it arrives (duty 1.0).
ScheduleResult schedule_transmission(const DutyCycleConfig& config, double duration,
                                     double link_rate_bytes_per_s,
                                     int frame_rate = 60,
                                     const std::vector<double>& event_times = {},
                                     std::size_t ring_capacity = 131072);

} // namespace pmu
