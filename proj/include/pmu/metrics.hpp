// Standard error metrics (TVE, FE, RFE) against analytic ground truth and
// step-response analysis over 20 staggered trials merged to a high
// resolution time axis.
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "pmu/estimator.hpp"
#include "pmu/signalgen.hpp"

namespace pmu {

// 100 * |estimate - truth| / |truth|, truth nonzero.
double tve_percent(std::complex<double> estimate, std::complex<double> truth);

double fe_hz(double f_est, double f_true);
double rfe_hzps(double r_est, double r_true);

struct ErrorSample {
    double timestamp = 0;
    double tve_pct = 0;
    double fe = 0;
    double rfe = 0;
};

struct ErrorSeries {
    std::vector<ErrorSample> samples;

    double max_tve() const;
    double max_fe() const;
    double max_rfe() const;
};

// Frames scored against truth over [t_begin, t_end]; frames outside the
// window are skipped.
ErrorSeries score_frames(const std::vector<PhasorFrame>& frames,
                         const GroundTruth& truth, double t_begin, double t_end);

// timestamp,tve_pct,fe_hz,rfe_hzps
void write_error_csv(const std::string& path, const ErrorSeries& series);

// One staggered run of a step test. stagger must be k/20 and distinct
// across the family's 20 trials.
struct StepTrial {
    double stagger = 0;      // fraction of the reporting interval
    double step_instant = 0; // absolute step time for this trial
    GroundTruth truth;
    std::vector<PhasorFrame> frames;
};

// Trials interleaved on a common axis relative to the step instant at
// reporting_interval/20 spacing.
struct MergedStep {
    std::vector<double> time; // s, relative to step
    std::vector<double> v_mag;
    std::vector<double> v_phase; // unwrapped around the step
    std::vector<double> tve_pct;
    std::vector<double> fe;
    std::vector<double> rfe;

    std::size_t size() const { return time.size(); }
};

// Requires exactly 20 trials with distinct staggers {0..19}/20; trims every
// trial to `span` seconds either side of its step so the merged axis is
// uniform.
MergedStep align_step_trials(const std::vector<StepTrial>& trials, double span);

struct StepLimits {
    double tve_pct = 1.0;
    double fe = 0.005;
    double rfe = 0.1;
};

struct StepMetrics {
    double overshoot = 0;   // fraction of step size, >= 0
    double delay_time = 0;  // s to the 50% crossing
    bool delay_defined = false;
    double response_time_tve = 0; // s between first and last limit exceedance
    double response_time_fe = 0;
    double response_time_rfe = 0;
    double pre_value = 0;  // steady reference before the step
    double post_value = 0; // steady reference after
};

// Analyses the stepped quantity (v_mag or v_phase per phase_step). Steady
// references average 1 s on each side, excluding 200 ms next to the step.
// Response times bracket first-to-last exceedance of the steady limits.
StepMetrics step_metrics(const MergedStep& merged, bool phase_step,
                         double step_size, const StepLimits& limits);

// t_rel,v_mag,v_phase,tve_pct,fe_hz,rfe_hzps
void write_step_csv(const std::string& path, const MergedStep& merged);

} // namespace pmu
