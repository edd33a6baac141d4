#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pmu/metrics.hpp"

using namespace pmu;

namespace {

// Stepped magnitude on the merged 1/1200 s grid, indexed by grid slot m
// relative to the step. 1.0 -> 1.1 with a 1.12 overshoot plateau.
double mag_curve(long m) {
    if (m <= 0) return 1.0;
    if (m == 1) return 1.02;
    if (m == 2) return 1.06;
    if (m == 3) return 1.09;
    if (m <= 14) return 1.12;
    if (m <= 23) return 1.11;
    return 1.10;
}

MergedStep make_merged() {
    MergedStep merged;
    for (long j = 0; j <= 3000; ++j) {
        long m = j - 1500;
        merged.time.push_back(static_cast<double>(m) / 1200.0);
        merged.v_mag.push_back(mag_curve(m));
        merged.v_phase.push_back(0.05);
        merged.tve_pct.push_back(m >= 0 && m <= 14 ? 2.0 : 0.1);
        merged.fe.push_back(m >= 1 && m <= 24 ? 0.02 : 0.0005);
        merged.rfe.push_back(m >= 1 && m <= 12 ? 0.5 : 0.01);
    }
    return merged;
}

} // namespace

TEST_CASE("tve identities") {
    std::complex<double> one(1.0, 0.0);
    CHECK(tve_percent(one, one) == 0.0);
    CHECK(tve_percent({1.001, 0.0}, one) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(tve_percent({1.000160, 0.0}, one) == doctest::Approx(0.016).epsilon(1e-9));

    // A pure 0.01 rad phase error is ~1% TVE.
    CHECK(tve_percent(std::polar(1.0, 0.01), one) == doctest::Approx(1.0).epsilon(1e-4));

    // Rotating and scaling both phasors together changes nothing.
    std::complex<double> est(0.93, 0.21), truth(0.95, 0.18);
    std::complex<double> q = std::polar(2.5, 1.234);
    CHECK(tve_percent(est * q, truth * q) ==
          doctest::Approx(tve_percent(est, truth)).epsilon(1e-12));

    CHECK_THROWS(tve_percent(one, {0.0, 0.0}));
    CHECK(fe_hz(59.995, 60.0) == doctest::Approx(0.005));
    CHECK(rfe_hzps(-0.3, 0.1) == doctest::Approx(0.4));
}

TEST_CASE("score_frames windows and maxima") {
    TestSignalSpec spec;
    spec.amplitude = std::numbers::sqrt2; // 1.0 pu RMS truth
    GroundTruth truth{spec};

    auto frame = [](double t, double mag, double freq, double rocof) {
        PhasorFrame f;
        f.timestamp = t;
        f.v_mag = mag;
        f.v_phase = 0.0;
        f.frequency = freq;
        f.rocof = rocof;
        return f;
    };
    std::vector<PhasorFrame> frames = {
        frame(0.5, 1.05, 60.1, 1.0), // before the window
        frame(1.5, 1.01, 60.001, 0.002),
        frame(2.5, 1.005, 59.9995, -0.001),
        frame(3.5, 1.2, 61.0, 5.0), // after the window
    };

    ErrorSeries series = score_frames(frames, truth, 1.0, 3.0);
    REQUIRE(series.samples.size() == 2);
    CHECK(series.max_tve() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(series.max_fe() == doctest::Approx(0.001).epsilon(1e-9));
    CHECK(series.max_rfe() == doctest::Approx(0.002).epsilon(1e-9));

    ErrorSeries empty;
    CHECK(empty.max_tve() == 0.0);
}

TEST_CASE("step trials interleave onto a 1/1200 s axis") {
    std::vector<StepTrial> trials;
    for (int k = 0; k < 20; ++k) {
        StepTrial trial;
        trial.stagger = k / 20.0;

        TestSignalSpec spec;
        spec.kind = SignalKind::MagnitudeStep;
        spec.amplitude = std::numbers::sqrt2;
        spec.step_size = 0.1;
        spec.step_time = 10.0;
        spec.step_stagger = trial.stagger;
        trial.truth = GroundTruth{spec};
        trial.step_instant = spec.step_instant();

        for (long j = 0; j < 180; ++j) {
            long m = k + 20 * j - 1800;
            PhasorFrame f;
            f.timestamp = trial.step_instant + static_cast<double>(m) / 1200.0;
            f.v_mag = mag_curve(m);
            f.v_phase = 0.0;
            f.frequency = 60.0 + (m >= 1 && m <= 24 ? 0.02 : 0.0005);
            f.rocof = m >= 1 && m <= 12 ? 0.5 : 0.01;
            trial.frames.push_back(f);
        }
        trials.push_back(trial);
    }

    MergedStep merged = align_step_trials(trials, 1.25);
    REQUIRE(merged.size() >= 2999);
    CHECK(merged.size() <= 3001);
    for (std::size_t i = 1; i < merged.size(); ++i)
        CHECK(merged.time[i] - merged.time[i - 1] ==
              doctest::Approx(1.0 / 1200.0).epsilon(1e-6));
    CHECK(merged.time.front() >= -1.25 - 1e-9);
    CHECK(merged.time.back() <= 1.25 + 1e-9);

    // tve column derives from the per-trial truth: flat top sits 1.818%
    // off the post-step reference, settled tail scores ~0.
    std::size_t hits = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        long m = std::lround(merged.time[i] * 1200.0);
        CHECK(merged.v_mag[i] == mag_curve(m));
        if (m >= 4 && m <= 14) {
            CHECK(merged.tve_pct[i] == doctest::Approx(100.0 * 0.02 / 1.1).epsilon(1e-9));
            ++hits;
        }
        if (m < -2) CHECK(merged.tve_pct[i] < 1e-9);
    }
    CHECK(hits == 11);

    StepMetrics metrics = step_metrics(merged, false, 0.1, StepLimits{});
    CHECK(metrics.pre_value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(metrics.post_value == doctest::Approx(1.1).epsilon(1e-9));
    CHECK(metrics.response_time_tve == doctest::Approx(14.0 / 1200.0).epsilon(1e-6));
    CHECK(metrics.response_time_fe == doctest::Approx(23.0 / 1200.0).epsilon(1e-6));
    CHECK(metrics.response_time_rfe == doctest::Approx(11.0 / 1200.0).epsilon(1e-6));

    SUBCASE("wrong trial count") {
        trials.pop_back();
        CHECK_THROWS(align_step_trials(trials, 1.25));
    }
    SUBCASE("duplicate stagger") {
        trials[3].stagger = trials[4].stagger;
        CHECK_THROWS(align_step_trials(trials, 1.25));
    }
    SUBCASE("off-grid stagger") {
        trials[3].stagger = 0.013;
        CHECK_THROWS(align_step_trials(trials, 1.25));
    }
}

TEST_CASE("magnitude step analysis") {
    MergedStep merged = make_merged();
    StepMetrics m = step_metrics(merged, false, 0.1, StepLimits{});

    CHECK(m.pre_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.post_value == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(m.overshoot == doctest::Approx(0.2).epsilon(1e-9));
    REQUIRE(m.delay_defined);
    // Mid level 1.05 sits 3/4 of the way from 1.02 to 1.06.
    CHECK(m.delay_time == doctest::Approx(1.75 / 1200.0).epsilon(1e-6));
    CHECK(m.response_time_tve == doctest::Approx(14.0 / 1200.0).epsilon(1e-9));
    CHECK(m.response_time_fe == doctest::Approx(23.0 / 1200.0).epsilon(1e-9));
    CHECK(m.response_time_rfe == doctest::Approx(11.0 / 1200.0).epsilon(1e-9));
}

TEST_CASE("descending step keeps its sign conventions") {
    MergedStep merged;
    for (long m = -1500; m <= 1500; ++m) {
        double v = 1.0;
        if (m == 1) v = 0.95;
        else if (m >= 2 && m <= 5) v = 0.88;
        else if (m >= 6) v = 0.90;
        merged.time.push_back(static_cast<double>(m) / 1200.0);
        merged.v_mag.push_back(v);
        merged.v_phase.push_back(0.0);
        merged.tve_pct.push_back(0.0);
        merged.fe.push_back(0.0);
        merged.rfe.push_back(0.0);
    }
    StepMetrics m = step_metrics(merged, false, -0.1, StepLimits{});
    CHECK(m.pre_value == doctest::Approx(1.0));
    CHECK(m.post_value == doctest::Approx(0.9));
    CHECK(m.overshoot == doctest::Approx(0.2).epsilon(1e-9)); // 0.88 undershoot
    REQUIRE(m.delay_defined);
    CHECK(m.delay_time == doctest::Approx(1.0 / 1200.0).epsilon(1e-6));
    CHECK(m.response_time_tve == 0.0);
}

TEST_CASE("phase step analyses the phase channel") {
    MergedStep merged;
    for (long m = -1500; m <= 1500; ++m) {
        double p = 0.0;
        if (m == 1) p = 0.03;
        else if (m == 2) p = 0.09;
        else if (m >= 3 && m <= 10) p = 0.16;
        else if (m >= 11) p = 0.15;
        merged.time.push_back(static_cast<double>(m) / 1200.0);
        merged.v_mag.push_back(1.0); // flat: a mag analysis would see no step
        merged.v_phase.push_back(p);
        merged.tve_pct.push_back(0.0);
        merged.fe.push_back(0.0);
        merged.rfe.push_back(0.0);
    }
    StepMetrics m = step_metrics(merged, true, 0.15, StepLimits{});
    CHECK(m.pre_value == doctest::Approx(0.0));
    CHECK(m.post_value == doctest::Approx(0.15));
    CHECK(m.overshoot == doctest::Approx(0.01 / 0.15).epsilon(1e-6));
    REQUIRE(m.delay_defined);
    CHECK(m.delay_time == doctest::Approx(1.75 / 1200.0).epsilon(1e-6));
}

TEST_CASE("degenerate merged responses") {
    MergedStep flat;
    for (long m = -1500; m <= 1500; ++m) {
        flat.time.push_back(static_cast<double>(m) / 1200.0);
        flat.v_mag.push_back(1.0);
        flat.v_phase.push_back(0.0);
        flat.tve_pct.push_back(0.0);
        flat.fe.push_back(0.0);
        flat.rfe.push_back(0.0);
    }
    StepMetrics m = step_metrics(flat, false, 0.1, StepLimits{});
    CHECK(!m.delay_defined); // never crosses a midpoint it already sits on
    CHECK(m.overshoot == doctest::Approx(0.0));

    MergedStep tiny;
    tiny.time = {0.0, 0.1};
    tiny.v_mag = {1.0, 1.0};
    tiny.v_phase = {0.0, 0.0};
    tiny.tve_pct = {0.0, 0.0};
    tiny.fe = {0.0, 0.0};
    tiny.rfe = {0.0, 0.0};
    CHECK_THROWS(step_metrics(tiny, false, 0.1, StepLimits{}));

    MergedStep uncovered; // nothing in the pre-step steady window
    uncovered.time = {0.3, 0.4, 0.5};
    uncovered.v_mag = {1.0, 1.0, 1.0};
    uncovered.v_phase = {0.0, 0.0, 0.0};
    uncovered.tve_pct = {0.0, 0.0, 0.0};
    uncovered.fe = {0.0, 0.0, 0.0};
    uncovered.rfe = {0.0, 0.0, 0.0};
    CHECK_THROWS(step_metrics(uncovered, false, 0.1, StepLimits{}));
}

TEST_CASE("csv layouts") {
    auto dir = std::filesystem::temp_directory_path();

    ErrorSeries series;
    series.samples.push_back({1.0, 0.5, 0.001, 0.02});
    auto err_path = dir / "pmu_metrics_err.csv";
    write_error_csv(err_path.string(), series);
    std::ifstream err_in(err_path);
    std::string header;
    std::getline(err_in, header);
    CHECK(header == "timestamp,tve_pct,fe_hz,rfe_hzps");

    auto step_path = dir / "pmu_metrics_step.csv";
    write_step_csv(step_path.string(), make_merged());
    std::ifstream step_in(step_path);
    std::getline(step_in, header);
    CHECK(header == "t_rel,v_mag,v_phase,tve_pct,fe_hz,rfe_hzps");

    std::filesystem::remove(err_path);
    std::filesystem::remove(step_path);
}
