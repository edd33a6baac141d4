#include "pmu/compliance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace pmu {

namespace {

std::string format_id(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

constexpr double kLeadIn = 2.0;
constexpr double kScoreWindow = 5.0;
constexpr double kRampMargin = 0.25; // settle margin at the ramp corners
constexpr double kStepSpan = 1.25;   // merged-response half width
constexpr int kReferenceTotal = 523; // published campaign size

TestSignalSpec base_spec(double f0, double rate) {
    TestSignalSpec s;
    s.f0 = f0;
    s.f1 = f0;
    s.amplitude = 1.0;
    s.reporting_rate = rate;
    s.lead_in = kLeadIn;
    s.duration = kLeadIn + kScoreWindow + 0.25;
    return s;
}

// Interfering tones: 10..30 Hz by 5 and 90..120 Hz by 2 (21 total).
std::vector<double> oob_tones() {
    std::vector<double> tones;
    for (int f = 10; f <= 30; f += 5) tones.push_back(f);
    for (int f = 90; f <= 120; f += 2) tones.push_back(f);
    return tones;
}

uint64_t run_seed(uint64_t base, const std::string& id, int run) {
    uint64_t h = std::hash<std::string>{}(id);
    return base ^ (h * 0x9e3779b97f4a7c15ULL) ^ (static_cast<uint64_t>(run) << 48);
}

} // namespace

EnumeratedSuite enumerate_tests(double f0, double rate, const LimitTable& limits) {
    if (f0 != 50.0 && f0 != 60.0)
        throw std::invalid_argument("f0 must be 50 or 60");
    if (rate <= 0 || std::fmod(3840.0, rate) != 0.0)
        throw std::invalid_argument("unsupported reporting rate");

    EnumeratedSuite suite;
    suite.reference_total = kReferenceTotal;
    auto limit = [&](const char* key) { return limits.value(key); };

    auto add = [&](TestCase c) {
        suite.class_counts[c.test_class] += 1;
        suite.cases.push_back(std::move(c));
    };

    // Steady state: fundamentals across the +-5 Hz M-class band, 0.1-Hz steps.
    for (int i = 0; i <= 100; ++i) {
        TestCase c;
        c.test_class = "steady_state";
        c.spec = base_spec(f0, rate);
        c.spec.kind = SignalKind::SteadyState;
        c.spec.f1 = f0 - 5.0 + 0.1 * i;
        c.id = "steady/f" + format_id("%.1f", c.spec.f1);
        c.limits.tve_pct = limit("steady_state.tve_pct");
        c.limits.fe_hz = limit("steady_state.fe_hz");
        c.limits.rfe_hzps = limit("steady_state.rfe_hzps");
        c.eval_begin = kLeadIn;
        c.eval_end = kLeadIn + kScoreWindow;
        c.description = "steady tone at " + format_id("%.1f", c.spec.f1) + " Hz";
        add(std::move(c));
    }

    // Harmonics 2..50 at 10% of nominal magnitude.
    for (int h = 2; h <= 50; ++h) {
        TestCase c;
        c.test_class = "harmonic";
        c.spec = base_spec(f0, rate);
        c.spec.kind = SignalKind::Harmonic;
        c.spec.harmonic_order = h;
        c.spec.interference_level = 0.1;
        c.id = "harmonic/h" + format_id("%02.0f", static_cast<double>(h));
        c.limits.tve_pct = limit("harmonic.tve_pct");
        c.limits.fe_hz = limit("harmonic.fe_hz");
        c.eval_begin = kLeadIn;
        c.eval_end = kLeadIn + kScoreWindow;
        c.description = "harmonic order " + std::to_string(h) + " at 10%";
        add(std::move(c));
    }

    // Amplitude and phase modulation, fm 0.1..5.0 Hz in 0.1-Hz steps.
    for (int kind = 0; kind < 2; ++kind) {
        for (int j = 1; j <= 50; ++j) {
            TestCase c;
            c.test_class = kind == 0 ? "mod_am" : "mod_pm";
            c.spec = base_spec(f0, rate);
            c.spec.kind = kind == 0 ? SignalKind::AmplitudeModulation
                                    : SignalKind::PhaseModulation;
            c.spec.fm = 0.1 * j;
            c.id = c.test_class + "/fm" + format_id("%.1f", c.spec.fm);
            c.limits.tve_pct = limit("mod.tve_pct");
            c.limits.fe_hz = limit("mod.fe_hz");
            c.limits.rfe_hzps = limit("mod.rfe_hzps");
            c.eval_begin = kLeadIn;
            c.eval_end = kLeadIn + kScoreWindow;
            c.description = (kind == 0 ? std::string("amplitude") : std::string("phase")) +
                            " modulation at " + format_id("%.1f", c.spec.fm) + " Hz";
            add(std::move(c));
        }
    }

    // Frequency ramps across f0 +- 5 Hz at 1 Hz/s, both directions.
    for (int dir = 0; dir < 2; ++dir) {
        TestCase c;
        c.test_class = "ramp";
        c.spec = base_spec(f0, rate);
        c.spec.kind = SignalKind::FrequencyRamp;
        c.spec.ramp_rate = dir == 0 ? 1.0 : -1.0;
        c.spec.ramp_start = dir == 0 ? f0 - 5.0 : f0 + 5.0;
        c.spec.ramp_end = dir == 0 ? f0 + 5.0 : f0 - 5.0;
        c.spec.duration = kLeadIn + 10.0 + 0.5;
        c.id = dir == 0 ? "ramp/up" : "ramp/down";
        c.limits.tve_pct = limit("ramp.tve_pct");
        c.limits.fe_hz = limit("ramp.fe_hz");
        c.limits.rfe_hzps = limit("ramp.rfe_hzps");
        c.eval_begin = kLeadIn + kRampMargin;
        c.eval_end = kLeadIn + 10.0 - kRampMargin;
        c.description = std::string("frequency ramp ") + (dir == 0 ? "up" : "down") +
                        " at 1 Hz/s";
        add(std::move(c));
    }

    // Out-of-band interference; the fundamental sweep runs inside the test.
    for (double tone : oob_tones()) {
        TestCase c;
        c.test_class = "oob";
        c.spec = base_spec(f0, rate);
        c.spec.kind = SignalKind::OutOfBand;
        c.spec.interference_freq = tone;
        c.spec.interference_level = 0.1;
        c.id = "oob/fi" + format_id("%03.0f", tone);
        c.limits.tve_pct = limit("oob.tve_pct");
        c.limits.fe_hz = limit("oob.fe_hz");
        c.eval_begin = kLeadIn;
        c.eval_end = kLeadIn + kScoreWindow;
        c.description = "out-of-band tone at " + format_id("%.0f", tone) +
                        " Hz, worst over fundamentals";
        add(std::move(c));
    }

    // Step families: +-10% magnitude, +-pi/18 phase, 20 staggers each.
    struct Family {
        const char* name;
        SignalKind kind;
        double size;
    };
    const Family families[] = {
        {"mag_up", SignalKind::MagnitudeStep, 0.1},
        {"mag_down", SignalKind::MagnitudeStep, -0.1},
        {"phase_up", SignalKind::PhaseStep, std::numbers::pi / 18},
        {"phase_down", SignalKind::PhaseStep, -std::numbers::pi / 18},
    };
    for (const Family& fam : families) {
        for (int k = 0; k < 20; ++k) {
            TestCase c;
            c.test_class = "step";
            c.spec = base_spec(f0, rate);
            c.spec.kind = fam.kind;
            c.spec.step_size = fam.size;
            c.spec.step_time = kLeadIn + 1.5;
            c.spec.step_stagger = k / 20.0;
            c.spec.duration = kLeadIn + 3.25;
            c.id = std::string("step/") + fam.name + "/s" +
                   format_id("%02.0f", static_cast<double>(k));
            c.limits.overshoot_fraction = limit("step.overshoot_fraction");
            c.limits.delay_s = limit("step.delay_s");
            c.limits.response_s = limit("step.response_s");
            c.step_limits = StepLimits{limit("steady_state.tve_pct"),
                                       limit("steady_state.fe_hz"),
                                       limit("steady_state.rfe_hzps")};
            c.eval_begin = c.spec.step_time - 0.25;
            c.eval_end = c.spec.step_time + 0.25;
            c.description = std::string(fam.name) + " step, stagger " +
                            std::to_string(k) + "/20";
            add(std::move(c));
        }
    }

    return suite;
}

namespace {

std::vector<PhasorFrame> run_estimator(const TestSignalSpec& spec,
                                       const RunOptions& options, uint64_t seed,
                                       uint64_t& saturations) {
    SynthesisResult synth = synthesize(spec, options.estimator.fs);
    SampledSignal signal = synth.signal;
    if (options.enob < 16) {
        AdcModel adc;
        adc.enob = options.enob;
        adc.full_scale = options.adc_full_scale;
        signal = apply_adc(signal, adc, seed).signal;
    }
    Estimator est(options.estimator);
    auto frames = est.process(signal, signal);
    saturations += est.saturation_total();
    return frames;
}

TestResult run_step_family(const TestCase& test, const RunOptions& options) {
    std::vector<StepTrial> trials;
    trials.reserve(20);
    uint64_t saturations = 0;
    for (int k = 0; k < 20; ++k) {
        TestSignalSpec spec = test.spec;
        spec.step_stagger = k / 20.0;
        StepTrial trial;
        trial.stagger = spec.step_stagger;
        trial.step_instant = spec.step_instant();
        trial.truth.spec = spec;
        trial.frames = run_estimator(spec, options, run_seed(options.seed, test.id, k),
                                     saturations);
        trials.push_back(std::move(trial));
    }
    MergedStep merged = align_step_trials(trials, kStepSpan);

    bool phase_step = test.spec.kind == SignalKind::PhaseStep;
    double step_units = phase_step
                            ? test.spec.step_size
                            : test.spec.step_size * test.spec.amplitude / std::numbers::sqrt2;
    StepMetrics metrics = step_metrics(merged, phase_step, step_units, test.step_limits);

    TestResult out;
    out.id = test.id;
    out.step = metrics;
    Verdict& v = out.verdict;
    v.id = test.id;
    v.saturations = saturations;
    v.overshoot.apply(metrics.overshoot, test.limits.overshoot_fraction);
    double delay = metrics.delay_defined ? metrics.delay_time
                                         : std::numeric_limits<double>::infinity();
    v.delay.apply(delay, test.limits.delay_s);
    v.response.apply(metrics.response_time_tve, test.limits.response_s);
    v.finalize();
    return out;
}

} // namespace

TestResult run_test(const TestCase& test, const RunOptions& options) {
    if (test.test_class == "step") return run_step_family(test, options);

    // OOB scores the worst metric across the fundamental sweep.
    std::vector<double> fundamentals{test.spec.f1};
    if (test.spec.kind == SignalKind::OutOfBand) {
        fundamentals.clear();
        for (int df = -3; df <= 3; ++df)
            fundamentals.push_back(test.spec.f0 + df);
    }

    TestResult out;
    out.id = test.id;
    uint64_t saturations = 0;
    double worst_tve = -1.0, worst_fe = 0.0, worst_rfe = 0.0;
    for (std::size_t run = 0; run < fundamentals.size(); ++run) {
        TestSignalSpec spec = test.spec;
        spec.f1 = fundamentals[run];
        GroundTruth truth;
        truth.spec = spec;
        auto frames = run_estimator(spec, options,
                                    run_seed(options.seed, test.id, static_cast<int>(run)),
                                    saturations);
        ErrorSeries series = score_frames(frames, truth, test.eval_begin, test.eval_end);
        if (series.samples.empty())
            throw std::runtime_error(test.id + ": no frames in the evaluation window");
        worst_fe = std::max(worst_fe, series.max_fe());
        worst_rfe = std::max(worst_rfe, series.max_rfe());
        if (series.max_tve() > worst_tve) {
            worst_tve = series.max_tve();
            out.series = std::move(series);
        }
    }

    Verdict& v = out.verdict;
    v.id = test.id;
    v.saturations = saturations;
    v.tve.apply(worst_tve, test.limits.tve_pct);
    v.fe.apply(worst_fe, test.limits.fe_hz);
    v.rfe.apply(worst_rfe, test.limits.rfe_hzps);
    v.finalize();
    return out;
}

bool id_matches(const std::string& pattern, const std::string& id) {
    // Iterative glob with '*' backtracking.
    std::size_t p = 0, s = 0, star = std::string::npos, mark = 0;
    while (s < id.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == id[s])) {
            ++p;
            ++s;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

SuiteResult run_suite(const EnumeratedSuite& suite, const SuiteOptions& options) {
    // Step families are evaluated once; every member shares the verdict.
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < suite.cases.size(); ++i)
        if (id_matches(options.id_filter, suite.cases[i].id)) selected.push_back(i);

    struct Unit {
        std::size_t case_index;
        std::vector<std::size_t> members; // result slots fed by this unit
    };
    std::vector<Unit> units;
    std::map<std::string, std::size_t> family_units;
    for (std::size_t slot = 0; slot < selected.size(); ++slot) {
        const TestCase& c = suite.cases[selected[slot]];
        if (c.test_class == "step") {
            std::string family = c.id.substr(0, c.id.rfind('/'));
            auto [it, fresh] = family_units.try_emplace(family, units.size());
            if (fresh) units.push_back({selected[slot], {}});
            units[it->second].members.push_back(slot);
        } else {
            units.push_back({selected[slot], {slot}});
        }
    }

    SuiteResult out;
    out.class_counts = suite.class_counts;
    out.reference_total = suite.reference_total;
    out.results.resize(selected.size());

    unsigned hw = std::thread::hardware_concurrency();
    unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                           : (hw > 0 ? hw : 4);
    threads = std::min<unsigned>(threads, units.empty() ? 1 : static_cast<unsigned>(units.size()));

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(threads);
    auto worker = [&](unsigned tid) {
        for (;;) {
            std::size_t u = next.fetch_add(1);
            if (u >= units.size()) return;
            try {
                TestResult result = run_test(suite.cases[units[u].case_index], options.run);
                for (std::size_t slot : units[u].members) {
                    TestResult copy = result;
                    copy.id = suite.cases[selected[slot]].id;
                    copy.verdict.id = copy.id;
                    out.results[slot] = std::move(copy);
                }
            } catch (const std::exception& e) {
                if (errors[tid].empty())
                    errors[tid] = suite.cases[units[u].case_index].id + ": " + e.what();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
        if (!err.empty()) throw std::runtime_error(err);

    for (const TestResult& r : out.results) {
        if (!r.verdict.overall) {
            out.overall = false;
            ++out.failed;
        }
    }
    return out;
}

int suite_exit_code(const SuiteResult& result) { return result.overall ? 0 : 1; }

} // namespace pmu
