// Local-oscillator and GPS PPS discipline model. The sampler counts 12-MHz
// clock cycles between PPS edges and spreads the measured count over one
// second of sample periods, so timing error never accumulates across a
// second and no phase jump occurs at the boundary.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pmu {

struct ClockModel {
    double nominal_hz = 12'000'000.0;
    double ppm_error = 0.0;  // |ppm| < 1000
    double jitter_rms = 0.0; // seconds per PPS edge
    uint64_t seed = 0;

    double actual_hz() const { return nominal_hz * (1.0 + ppm_error * 1e-6); }
    void validate() const;
};

// Cycles counted between two consecutive PPS edges. Deterministic per seed;
// edge_index selects which interval, so consecutive measurements differ
// only by jitter.
int64_t measure_pps_interval(const ClockModel& clock, int edge_index = 0);

struct SkewSchedule {
    std::vector<int32_t> periods; // cycles per sample period, fs entries
    int64_t total_cycles = 0;     // == measured cycle count

    int32_t min_period() const;
    int32_t max_period() const;
};

// Bresenham spread of measured_cycles over fs periods: every entry is
// floor or ceil of the mean and the sum is exact.
SkewSchedule build_schedule(int64_t measured_cycles, double fs);

// Stateful wrapper implementing holdover: an out-of-range measurement is
// flagged and the previous schedule stays in force.
class PpsDiscipline {
public:
    PpsDiscipline(double nominal_hz, double fs);

    bool update(int64_t measured_cycles); // false when rejected (holdover)
    const SkewSchedule& schedule() const { return schedule_; }
    bool in_holdover() const { return holdover_; }

private:
    double nominal_hz_;
    double fs_;
    SkewSchedule schedule_;
    bool holdover_ = false;
};

// True-time sample instants for `seconds` seconds of corrected sampling.
// Each PPS edge restarts the schedule; cycle durations follow the actual
// (drifted) oscillator rate.
std::vector<double> simulate_sampling(const ClockModel& clock,
                                      const SkewSchedule& schedule, int seconds);

// Same sampler with the nominal uniform period (no discipline); drift
// accumulates linearly within each second.
std::vector<double> simulate_sampling_uncorrected(const ClockModel& clock,
                                                  double fs, int seconds);

// Worst |t_k - k/fs| taken per second (PPS realigns each second).
double max_grid_error(const std::vector<double>& timestamps, double fs);

// CSV: k,timestamp,ideal,error
void write_timestamps_csv(const std::string& path,
                          const std::vector<double>& timestamps, double fs);

} // namespace pmu
