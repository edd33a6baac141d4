// M-class suite orchestration: enumerate every test, run synthesize ->
// estimate -> score end-to-end, compare to the configurable limit table,
// and emit JSON/CSV reports.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmu/estimator.hpp"
#include "pmu/metrics.hpp"
#include "pmu/signalgen.hpp"

namespace pmu {

struct LimitEntry {
    double value = 0;
    std::string unit;
    std::string provenance;
    bool fixed = false; // fixed entries may not be overridden by config
};

// Keyed "class.metric" (e.g. "steady_state.fe_hz"). Fixed entries carry the
// M-class requirements the suite is certified against; the rest are
// editable defaults.
class LimitTable {
public:
    static LimitTable defaults();
    static LimitTable load(const std::string& path); // throws on schema or fixed-entry violation
    void save(const std::string& path) const;

    const LimitEntry* find(const std::string& key) const;
    double value(const std::string& key) const; // throws if missing
    const std::map<std::string, LimitEntry>& entries() const { return entries_; }

private:
    std::map<std::string, LimitEntry> entries_;
};

struct CaseLimits {
    std::optional<double> tve_pct;
    std::optional<double> fe_hz;
    std::optional<double> rfe_hzps;
    std::optional<double> overshoot_fraction;
    std::optional<double> delay_s;
    std::optional<double> response_s;

    bool any() const {
        return tve_pct || fe_hz || rfe_hzps || overshoot_fraction || delay_s || response_s;
    }
};

struct TestCase {
    std::string id;
    std::string test_class; // steady_state, harmonic, mod_am, mod_pm, ramp, oob, step
    TestSignalSpec spec;
    CaseLimits limits;
    StepLimits step_limits; // steady band for step response bracketing
    double eval_begin = 0;  // absolute seconds
    double eval_end = 0;
    std::string description;
};

struct EnumeratedSuite {
    std::vector<TestCase> cases;
    std::map<std::string, int> class_counts;
    int reference_total = 0; // published campaign size this suite mirrors

    int total() const { return static_cast<int>(cases.size()); }
};

// Deterministic enumeration: 101 steady-state fundamentals (55..65 by 0.1),
// 49 harmonic orders, 50 AM + 50 PM modulation frequencies (0.1..5 by 0.1),
// 2 ramps, 21 interfering tones (10..30 by 5 and 90..120 by 2, each swept
// over 7 fundamentals inside the run), and 4 step families x 20 staggers.
EnumeratedSuite enumerate_tests(double f0, double rate, const LimitTable& limits);

struct MetricVerdict {
    double measured = 0;
    std::optional<double> limit; // absent = not applicable
    bool pass = true;            // vacuously true when not applicable

    void apply(double m, std::optional<double> lim) {
        measured = m;
        limit = lim;
        pass = !lim || m <= *lim;
    }
};

struct Verdict {
    std::string id;
    MetricVerdict tve;
    MetricVerdict fe;
    MetricVerdict rfe;
    MetricVerdict overshoot; // step families only
    MetricVerdict delay;
    MetricVerdict response;
    bool overall = true;
    uint64_t saturations = 0; // fixed-backend events during the run

    void finalize() {
        overall = tve.pass && fe.pass && rfe.pass && overshoot.pass &&
                  delay.pass && response.pass;
    }
};

struct RunOptions {
    EstimatorConfig estimator;
    int enob = 16;    // < 16 enables the ADC impairment model
    uint64_t seed = 1;
    double adc_full_scale = 2.0; // per-unit span presented to the converter
};

struct TestResult {
    std::string id;
    Verdict verdict;
    ErrorSeries series;              // empty for step cases
    std::optional<StepMetrics> step; // step families only
};

// Steps run their whole 20-trial family and return the family verdict; OOB
// cases sweep the fundamental internally and keep the worst metric.
TestResult run_test(const TestCase& test, const RunOptions& options);

struct SuiteOptions {
    RunOptions run;
    std::string id_filter = "*"; // glob over test ids
    int threads = 0;             // 0 = hardware concurrency
};

struct SuiteResult {
    std::vector<TestResult> results; // enumeration order
    std::map<std::string, int> class_counts;
    int reference_total = 0;
    bool overall = true;
    int failed = 0;
};

SuiteResult run_suite(const EnumeratedSuite& suite, const SuiteOptions& options);

// Glob with '*' and '?'; used for --tests filters.
bool id_matches(const std::string& pattern, const std::string& id);

// Machine-readable report: config echo, class counts and reference-total
// comparison, per-test measured-vs-limit with provenance, assumption flags.
void write_report_json(const std::string& path, const SuiteResult& result,
                       const EnumeratedSuite& suite, const SuiteOptions& options,
                       const LimitTable& limits);

// id,class,pass,tve_max,tve_limit,fe_max,fe_limit,rfe_max,rfe_limit,...
void write_summary_csv(const std::string& path, const SuiteResult& result,
                       const EnumeratedSuite& suite);

int suite_exit_code(const SuiteResult& result);

} // namespace pmu
