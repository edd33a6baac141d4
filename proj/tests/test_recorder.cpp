#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pmu/recorder.hpp"

using namespace pmu;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PhasorFrame make_frame(double mag, double phase) {
    PhasorFrame f;
    f.v_mag = mag;
    f.v_phase = phase;
    f.i_mag = mag;
    f.i_phase = phase;
    return f;
}

double wrap_diff(double a, double b) {
    return std::remainder(a - b, kTwoPi);
}

} // namespace

TEST_CASE("magnitude quantization round trip stays within half an lsb") {
    const double half_lsb = kMagFullScale / 65535.0 / 2.0;
    for (int i = 0; i < 1000; ++i) {
        double mag = 1.99 * i / 999.0;
        QuantizeResult q = quantize(make_frame(mag, 0.0));
        CHECK(!q.saturated);
        PhasorFrame back = dequantize(q.frame);
        CHECK(std::abs(back.v_mag - mag) <= half_lsb + 1e-12);
        CHECK(back.i_mag == back.v_mag);
    }

    CHECK(quantize(make_frame(2.5, 0.0)).saturated);
    CHECK(quantize(make_frame(2.5, 0.0)).frame.v_mag_q == 65535);
    CHECK(quantize(make_frame(kMagFullScale, 0.0)).saturated); // at full scale
    CHECK(quantize(make_frame(-0.1, 0.0)).frame.v_mag_q == 0);
}

TEST_CASE("phase quantization wraps and lands on bin centers") {
    const double half_bin = std::numbers::pi / 65536.0;
    for (int i = 0; i < 1000; ++i) {
        double phase = -std::numbers::pi + kTwoPi * i / 1000.0;
        QuantizeResult q = quantize(make_frame(1.0, phase));
        PhasorFrame back = dequantize(q.frame);
        CHECK(std::abs(wrap_diff(back.v_phase, phase)) <= half_bin + 1e-12);
    }

    // A full turn maps back onto the same bin.
    CHECK(quantize(make_frame(1.0, 1.0 + kTwoPi)).frame.v_phase_q ==
          quantize(make_frame(1.0, 1.0)).frame.v_phase_q);
    QuantizeResult q = quantize(make_frame(1.0, 1.5 * std::numbers::pi));
    PhasorFrame back = dequantize(q.frame);
    CHECK(std::abs(back.v_phase + std::numbers::pi / 2) <= half_bin + 1e-12);

    // +pi folds onto the -pi end of the scale.
    CHECK(quantize(make_frame(1.0, std::numbers::pi)).frame.v_phase_q == 0);
}

TEST_CASE("frame wire layout is little endian") {
    QuantizedFrame q;
    q.v_mag_q = 0x1234;
    q.v_phase_q = 0xABCD;
    q.i_mag_q = 0x0001;
    q.i_phase_q = 0xFF00;

    uint8_t bytes[kFrameBytes];
    encode_frame(q, bytes);
    CHECK(bytes[0] == 0x34);
    CHECK(bytes[1] == 0x12);
    CHECK(bytes[2] == 0xCD);
    CHECK(bytes[3] == 0xAB);
    CHECK(bytes[4] == 0x01);
    CHECK(bytes[5] == 0x00);
    CHECK(bytes[6] == 0x00);
    CHECK(bytes[7] == 0xFF);

    QuantizedFrame d = decode_frame(bytes);
    CHECK(d.v_mag_q == q.v_mag_q);
    CHECK(d.v_phase_q == q.v_phase_q);
    CHECK(d.i_mag_q == q.i_mag_q);
    CHECK(d.i_phase_q == q.i_phase_q);
}

TEST_CASE("default ring holds more than 270 seconds at 60 fps") {
    RingBuffer ring;
    CHECK(ring.capacity_frames() == 16384);
    CHECK(ring.capacity_frames() / 60.0 > 270.0);

    QuantizedFrame f;
    for (int64_t k = 0; k < 16384; ++k) ring.push(f, k);
    CHECK(ring.frame_count() == 16384);
    CHECK(ring.overwritten() == 0);
    CHECK(ring.pending_bytes() == 131072);

    ring.push(f, 16384); // oldest frame falls out
    CHECK(ring.frame_count() == 16384);
    CHECK(ring.overwritten() == 1);

    CHECK_THROWS(RingBuffer(4, 60));
    CHECK_THROWS(RingBuffer(131072, 0));
}

TEST_CASE("drain emits one block per run within a UTC second") {
    RingBuffer ring(131072, 60);
    for (int64_t k = 30; k < 150; ++k) {
        QuantizedFrame f;
        f.v_mag_q = static_cast<uint16_t>(k);
        ring.push(f, k);
    }

    std::vector<uint8_t> bytes = ring.drain();
    CHECK(ring.frame_count() == 0);
    CHECK(bytes.size() == 3 * 16 + 120 * kFrameBytes);

    auto blocks = parse_blocks(bytes);
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0].utc_second == 0);
    CHECK(blocks[0].start_index == 30);
    CHECK(blocks[0].frames.size() == 30);
    CHECK(blocks[1].utc_second == 1);
    CHECK(blocks[1].start_index == 0);
    CHECK(blocks[1].frames.size() == 60);
    CHECK(blocks[2].utc_second == 2);
    CHECK(blocks[2].start_index == 0);
    CHECK(blocks[2].frames.size() == 30);

    // Payload round trip is lossless, in order.
    int64_t k = 30;
    for (const auto& block : blocks)
        for (const auto& f : block.frames) CHECK(f.v_mag_q == static_cast<uint16_t>(k++));

    CHECK(ring.drain().empty());
}

TEST_CASE("an index gap splits the block") {
    RingBuffer ring(131072, 60);
    QuantizedFrame f;
    for (int64_t k = 10; k < 15; ++k) ring.push(f, k);
    for (int64_t k = 17; k < 20; ++k) ring.push(f, k);

    auto blocks = parse_blocks(ring.drain());
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].start_index == 10);
    CHECK(blocks[0].frames.size() == 5);
    CHECK(blocks[1].start_index == 17);
    CHECK(blocks[1].frames.size() == 3);
}

TEST_CASE("parse rejects malformed streams") {
    std::vector<uint8_t> junk(15, 0);
    CHECK_THROWS(parse_blocks(junk));

    std::vector<uint8_t> bad(16, 0);
    CHECK_THROWS(parse_blocks(bad)); // wrong magic

    RingBuffer ring(131072, 60);
    QuantizedFrame f;
    ring.push(f, 0);
    ring.push(f, 1);
    auto bytes = ring.drain();
    bytes.resize(bytes.size() - 4); // cut into the payload
    CHECK_THROWS(parse_blocks(bytes));
}

TEST_CASE("partial pops feed the scheduler") {
    RingBuffer ring(131072, 60);
    QuantizedFrame f;
    for (int64_t k = 0; k < 5; ++k) ring.push(f, k);
    CHECK(ring.pop_frames(3) == 3);
    CHECK(ring.frame_count() == 2);
    CHECK(ring.pop_frames(10) == 2);
    CHECK(ring.pop_frames(1) == 0);
}

TEST_CASE("capture csv reconstructs timestamps from headers") {
    RingBuffer ring(131072, 60);
    for (int64_t k = 90; k < 95; ++k)
        ring.push(quantize(make_frame(1.0, 0.0)).frame, k);
    auto blocks = parse_blocks(ring.drain());

    auto path = std::filesystem::temp_directory_path() / "pmu_capture_test.csv";
    write_capture_csv(path.string(), blocks);
    std::ifstream in(path);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "t,v_mag,v_phase,i_mag,i_phase");
    CHECK(first.substr(0, first.find(',')) == "1.5"); // second 1, index 30
    std::filesystem::remove(path);
}

TEST_CASE("event detector triggers on jumps and frequency excursions") {
    EventConfig cfg;
    PhasorFrame prev = make_frame(1.0, 0.0);
    prev.frequency = 60.0;

    PhasorFrame jump = make_frame(1.15, 0.0);
    jump.frequency = 60.0;
    CHECK(detect_event(prev, jump, cfg, 60.0));

    PhasorFrame drift = make_frame(1.0, 0.0);
    drift.frequency = 60.6;
    CHECK(detect_event(prev, drift, cfg, 60.0));

    PhasorFrame quiet = make_frame(1.05, 0.0);
    quiet.frequency = 60.2;
    CHECK(!detect_event(prev, quiet, cfg, 60.0));
}

TEST_CASE("undersized link with a small ring loses frames") {
    DutyCycleConfig cfg; // Continuous, duty 0.18
    // 180 B/s effective vs a 480 B/s frame stream, 200-frame ring.
    ScheduleResult r = schedule_transmission(cfg, 60.0, 1000.0, 60, {}, 1600);
    CHECK(r.overflow_risk);
    CHECK(r.frames_lost > 0);
    CHECK(r.frames_sent > 0);
    CHECK(r.windows.size() == 12); // one wake per 5 s
    CHECK(r.effective_duty == doctest::Approx(0.18).epsilon(0.06));
}

TEST_CASE("adequate link drains the backlog every wake") {
    DutyCycleConfig cfg;
    ScheduleResult r = schedule_transmission(cfg, 60.0, 5000.0, 60);
    CHECK(!r.overflow_risk);
    CHECK(r.frames_lost == 0);
    CHECK(r.effective_duty == doctest::Approx(0.18).epsilon(0.06));
    // Everything sent except the tail still buffered after the last window.
    CHECK(r.frames_sent <= 3600);
    CHECK(r.frames_sent >= 3600 - 260);
}

TEST_CASE("immediate mode forwards every frame") {
    DutyCycleConfig cfg;
    cfg.mode = TransmitMode::Immediate;
    ScheduleResult r = schedule_transmission(cfg, 10.0, 1e6, 60);
    CHECK(r.effective_duty == doctest::Approx(1.0));
    CHECK(r.frames_sent == 600);
    CHECK(r.frames_lost == 0);
    CHECK(r.windows.size() == 1);
    CHECK(!r.overflow_risk);
}

TEST_CASE("event recorder wakes after the post-trigger window") {
    DutyCycleConfig cfg;
    cfg.mode = TransmitMode::EventRecorder;
    // 5 s of capture at 480 B/s takes 2 s to flush at 1200 B/s.
    ScheduleResult r = schedule_transmission(cfg, 20.0, 1200.0, 60, {10.0});
    REQUIRE(r.windows.size() == 1);
    CHECK(r.windows.front().t_begin == doctest::Approx(14.0).epsilon(0.002));
    CHECK(r.effective_duty == doctest::Approx(0.1).epsilon(0.02));
    CHECK(r.frames_sent == 300); // link-limited flush
    CHECK(r.frames_lost == 0);
}

TEST_CASE("scheduler validates its arguments") {
    DutyCycleConfig cfg;
    cfg.duty = 0.0;
    CHECK_THROWS(schedule_transmission(cfg, 10.0, 1000.0));
    cfg.duty = 1.1;
    CHECK_THROWS(schedule_transmission(cfg, 10.0, 1000.0));
    cfg.duty = 0.5;
    CHECK_THROWS(schedule_transmission(cfg, 0.0, 1000.0));
    CHECK_THROWS(schedule_transmission(cfg, 10.0, 0.0));
}
