#include "pmu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace pmu {

namespace {

double series_max(const std::vector<ErrorSample>& samples,
                  double ErrorSample::*field) {
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.*field);
    return worst;
}

} // namespace

double tve_percent(std::complex<double> estimate, std::complex<double> truth) {
    double denom = std::norm(truth);
    if (denom <= 0.0) throw std::invalid_argument("tve needs a nonzero truth phasor");
    return 100.0 * std::sqrt(std::norm(estimate - truth) / denom);
}

double fe_hz(double f_est, double f_true) { return std::abs(f_est - f_true); }

double rfe_hzps(double r_est, double r_true) { return std::abs(r_est - r_true); }

double ErrorSeries::max_tve() const { return series_max(samples, &ErrorSample::tve_pct); }
double ErrorSeries::max_fe() const { return series_max(samples, &ErrorSample::fe); }
double ErrorSeries::max_rfe() const { return series_max(samples, &ErrorSample::rfe); }

ErrorSeries score_frames(const std::vector<PhasorFrame>& frames,
                         const GroundTruth& truth, double t_begin, double t_end) {
    ErrorSeries out;
    for (const PhasorFrame& f : frames) {
        if (f.timestamp < t_begin || f.timestamp > t_end) continue;
        std::complex<double> est = std::polar(f.v_mag, f.v_phase);
        ErrorSample s;
        s.timestamp = f.timestamp;
        s.tve_pct = tve_percent(est, truth.phasor(f.timestamp));
        s.fe = fe_hz(f.frequency, truth.frequency(f.timestamp));
        s.rfe = rfe_hzps(f.rocof, truth.rocof(f.timestamp));
        out.samples.push_back(s);
    }
    return out;
}

void write_error_csv(const std::string& path, const ErrorSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(12);
    out << "timestamp,tve_pct,fe_hz,rfe_hzps\n";
    for (const auto& s : series.samples)
        out << s.timestamp << ',' << s.tve_pct << ',' << s.fe << ',' << s.rfe << '\n';
}

MergedStep align_step_trials(const std::vector<StepTrial>& trials, double span) {
    if (trials.size() != 20)
        throw std::invalid_argument("step alignment needs exactly 20 trials");
    std::vector<bool> seen(20, false);
    for (const auto& t : trials) {
        double scaled = t.stagger * 20.0;
        auto slot = static_cast<long>(std::lround(scaled));
        if (slot < 0 || slot >= 20 || std::abs(scaled - static_cast<double>(slot)) > 1e-9)
            throw std::invalid_argument("stagger values must be k/20");
        if (seen[static_cast<std::size_t>(slot)])
            throw std::invalid_argument("duplicate stagger value");
        seen[static_cast<std::size_t>(slot)] = true;
    }

    struct Point {
        double r;
        double v_mag, v_phase, tve, fe, rfe;
    };
    std::vector<Point> points;
    for (const auto& trial : trials) {
        for (const PhasorFrame& f : trial.frames) {
            double r = f.timestamp - trial.step_instant;
            if (r < -span || r > span) continue;
            std::complex<double> est = std::polar(f.v_mag, f.v_phase);
            Point p;
            p.r = r;
            p.v_mag = f.v_mag;
            p.v_phase = f.v_phase;
            p.tve = tve_percent(est, trial.truth.phasor(f.timestamp));
            p.fe = fe_hz(f.frequency, trial.truth.frequency(f.timestamp));
            p.rfe = rfe_hzps(f.rocof, trial.truth.rocof(f.timestamp));
            points.push_back(p);
        }
    }
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.r < b.r; });

    MergedStep merged;
    merged.time.reserve(points.size());
    for (const Point& p : points) {
        merged.time.push_back(p.r);
        merged.v_mag.push_back(p.v_mag);
        merged.v_phase.push_back(p.v_phase);
        merged.tve_pct.push_back(p.tve);
        merged.fe.push_back(p.fe);
        merged.rfe.push_back(p.rfe);
    }
    return merged;
}

namespace {

double mean_over(const MergedStep& m, const std::vector<double>& values, double r_begin,
                 double r_end) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.time[i] < r_begin || m.time[i] > r_end) continue;
        sum += values[i];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("merged response does not cover the steady window");
    return sum / static_cast<double>(count);
}

// Duration between first and last exceedance of the limit.
double exceedance_span(const MergedStep& m, const std::vector<double>& err, double limit) {
    double first = 0.0, last = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (err[i] <= limit) continue;
        if (!any) first = m.time[i];
        last = m.time[i];
        any = true;
    }
    return any ? last - first : 0.0;
}

} // namespace

StepMetrics step_metrics(const MergedStep& merged, bool phase_step, double step_size,
                         const StepLimits& limits) {
    if (merged.size() < 3) throw std::invalid_argument("merged response too short");
    const std::vector<double>& value = phase_step ? merged.v_phase : merged.v_mag;

    StepMetrics out;
    out.pre_value = mean_over(merged, value, -1.2, -0.2);
    out.post_value = mean_over(merged, value, 0.2, 1.2);
    double dir = out.post_value >= out.pre_value ? 1.0 : -1.0;
    double denom = std::abs(step_size) > 0 ? std::abs(step_size)
                                           : std::abs(out.post_value - out.pre_value);

    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (merged.time[i] <= 0) continue;
        double excursion = (value[i] - out.post_value) * dir;
        out.overshoot = std::max(out.overshoot, excursion / denom);
    }

    double mid = 0.5 * (out.pre_value + out.post_value);
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        double a = (value[i] - mid) * dir;
        double b = (value[i + 1] - mid) * dir;
        if (a < 0.0 && b >= 0.0) {
            double frac = (0.0 - a) / (b - a);
            double crossing = merged.time[i] + frac * (merged.time[i + 1] - merged.time[i]);
            out.delay_time = std::max(0.0, crossing);
            out.delay_defined = true;
            break;
        }
    }

    out.response_time_tve = exceedance_span(merged, merged.tve_pct, limits.tve_pct);
    out.response_time_fe = exceedance_span(merged, merged.fe, limits.fe);
    out.response_time_rfe = exceedance_span(merged, merged.rfe, limits.rfe);
    return out;
}

void write_step_csv(const std::string& path, const MergedStep& merged) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(12);
    out << "t_rel,v_mag,v_phase,tve_pct,fe_hz,rfe_hzps\n";
    for (std::size_t i = 0; i < merged.size(); ++i)
        out << merged.time[i] << ',' << merged.v_mag[i] << ',' << merged.v_phase[i]
            << ',' << merged.tve_pct[i] << ',' << merged.fe[i] << ',' << merged.rfe[i]
            << '\n';
}

} // namespace pmu
