// Sampled waveform container and file export (CSV and raw binary).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pmu {

// Uniformly sampled real waveform. t0 is the UTC-aligned start instant in
// seconds; sample k sits at t0 + k/fs.
struct SampledSignal {
    double fs = 3840.0;
    double t0 = 0.0;
    std::vector<double> samples;

    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) / fs; }
    double duration() const { return static_cast<double>(samples.size()) / fs; }
};

// CSV export, one "t,value" row per sample.
void write_waveform_csv(const std::string& path, const SampledSignal& sig);

// Raw binary: 16-byte header (magic "PMUSIG01", u32 fs, u32 count,
// little-endian), then count little-endian float64 samples.
void write_waveform_raw(const std::string& path, const SampledSignal& sig);
SampledSignal read_waveform_raw(const std::string& path);

} // namespace pmu
