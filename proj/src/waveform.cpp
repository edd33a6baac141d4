#include "pmu/waveform.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pmu {

namespace {

constexpr char kMagic[8] = {'P', 'M', 'U', 'S', 'I', 'G', '0', '1'};

void put_u32(std::ofstream& out, uint32_t v) {
    uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                    static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::ifstream& in) {
    uint8_t b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

} // namespace

void write_waveform_csv(const std::string& path, const SampledSignal& sig) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(12);
    out << "t,value\n";
    for (std::size_t k = 0; k < sig.samples.size(); ++k)
        out << sig.time_at(k) << ',' << sig.samples[k] << '\n';
}

void write_waveform_raw(const std::string& path, const SampledSignal& sig) {
    static_assert(std::endian::native == std::endian::little,
                  "raw waveform I/O assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write(kMagic, sizeof kMagic);
    put_u32(out, static_cast<uint32_t>(sig.fs));
    put_u32(out, static_cast<uint32_t>(sig.samples.size()));
    out.write(reinterpret_cast<const char*>(sig.samples.data()),
              static_cast<std::streamsize>(sig.samples.size() * sizeof(double)));
}

SampledSignal read_waveform_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("bad waveform magic in " + path);
    SampledSignal sig;
    sig.fs = static_cast<double>(get_u32(in));
    uint32_t count = get_u32(in);
    sig.samples.resize(count);
    in.read(reinterpret_cast<char*>(sig.samples.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated waveform file " + path);
    return sig;
}

} // namespace pmu
