#include "pmu/timing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace pmu {

namespace {

// PPS edge offsets are drawn once per seed so consecutive intervals share
// their common edge.
std::vector<double> edge_offsets(const ClockModel& clock, int count) {
    std::vector<double> offsets(static_cast<std::size_t>(count), 0.0);
    if (clock.jitter_rms > 0) {
        std::mt19937_64 rng(clock.seed);
        std::normal_distribution<double> noise(0.0, clock.jitter_rms);
        for (auto& o : offsets) o = noise(rng);
    }
    return offsets;
}

} // namespace

void ClockModel::validate() const {
    if (nominal_hz <= 0) throw std::invalid_argument("nominal rate must be positive");
    if (std::abs(ppm_error) >= 1000) throw std::invalid_argument("|ppm_error| must stay below 1000");
    if (jitter_rms < 0) throw std::invalid_argument("jitter must be nonnegative");
}

int64_t measure_pps_interval(const ClockModel& clock, int edge_index) {
    clock.validate();
    if (edge_index < 0) throw std::invalid_argument("edge index must be nonnegative");
    auto offsets = edge_offsets(clock, edge_index + 2);
    double interval = 1.0 + offsets[static_cast<std::size_t>(edge_index) + 1] -
                      offsets[static_cast<std::size_t>(edge_index)];
    return std::llround(clock.actual_hz() * interval);
}

int32_t SkewSchedule::min_period() const {
    return *std::min_element(periods.begin(), periods.end());
}

int32_t SkewSchedule::max_period() const {
    return *std::max_element(periods.begin(), periods.end());
}

SkewSchedule build_schedule(int64_t measured_cycles, double fs) {
    auto n = static_cast<int64_t>(std::llround(fs));
    if (n <= 0 || std::abs(fs - static_cast<double>(n)) > 1e-9)
        throw std::invalid_argument("fs must be a positive integer");
    if (measured_cycles < n)
        throw std::invalid_argument("cycle count smaller than the sample count");

    SkewSchedule out;
    out.total_cycles = measured_cycles;
    out.periods.resize(static_cast<std::size_t>(n));
    auto base = static_cast<int32_t>(measured_cycles / n);
    int64_t rem = measured_cycles % n;
    // Bresenham accumulator spreads the rem long periods evenly.
    int64_t acc = 0;
    for (auto& p : out.periods) {
        acc += rem;
        if (acc >= n) {
            acc -= n;
            p = base + 1;
        } else {
            p = base;
        }
    }
    return out;
}

PpsDiscipline::PpsDiscipline(double nominal_hz, double fs)
    : nominal_hz_(nominal_hz), fs_(fs),
      schedule_(build_schedule(std::llround(nominal_hz), fs)) {}

bool PpsDiscipline::update(int64_t measured_cycles) {
    double ppm = (static_cast<double>(measured_cycles) - nominal_hz_) / nominal_hz_ * 1e6;
    if (std::abs(ppm) >= 1000 || measured_cycles < std::llround(fs_)) {
        holdover_ = true;
        return false;
    }
    schedule_ = build_schedule(measured_cycles, fs_);
    holdover_ = false;
    return true;
}

std::vector<double> simulate_sampling(const ClockModel& clock,
                                      const SkewSchedule& schedule, int seconds) {
    clock.validate();
    if (seconds < 1) throw std::invalid_argument("need at least one second");
    double f_act = clock.actual_hz();
    auto offsets = edge_offsets(clock, seconds + 1);
    std::vector<double> out;
    out.reserve(schedule.periods.size() * static_cast<std::size_t>(seconds));
    for (int s = 0; s < seconds; ++s) {
        double edge = s + offsets[static_cast<std::size_t>(s)];
        int64_t cum = 0;
        for (int32_t p : schedule.periods) {
            out.push_back(edge + static_cast<double>(cum) / f_act);
            cum += p;
        }
    }
    return out;
}

std::vector<double> simulate_sampling_uncorrected(const ClockModel& clock, double fs,
                                                  int seconds) {
    SkewSchedule uniform = build_schedule(std::llround(clock.nominal_hz), fs);
    return simulate_sampling(clock, uniform, seconds);
}

double max_grid_error(const std::vector<double>& timestamps, double fs) {
    double worst = 0.0;
    for (std::size_t k = 0; k < timestamps.size(); ++k)
        worst = std::max(worst, std::abs(timestamps[k] - static_cast<double>(k) / fs));
    return worst;
}

void write_timestamps_csv(const std::string& path,
                          const std::vector<double>& timestamps, double fs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(15);
    out << "k,timestamp,ideal,error\n";
    for (std::size_t k = 0; k < timestamps.size(); ++k) {
        double ideal = static_cast<double>(k) / fs;
        out << k << ',' << timestamps[k] << ',' << ideal << ','
            << timestamps[k] - ideal << '\n';
    }
}

} // namespace pmu
