#include "scald/wav.hpp"

#include "scald/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace scald {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

template <typename T>
T read_le(std::istream& in) {
    unsigned char raw[sizeof(T)];
    in.read(reinterpret_cast<char*>(raw), sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
    T out;
    std::memcpy(&out, &v, sizeof(T));
    return out;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    std::uint64_t v = 0;
    std::memcpy(&v, &value, sizeof(T));
    unsigned char raw[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) raw[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(raw), sizeof(T));
}

float pcm16_to_float(std::int16_t v) { return static_cast<float>(v) / 32768.0f; }

std::int16_t float_to_pcm16(float v) {
    const float scaled = std::round(v * 32768.0f);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0f, 32767.0f));
}

void check_rate(int rate) {
    if (rate < 8000 || rate > 48000) {
        throw IoError("unsupported sample rate " + std::to_string(rate) +
                      " (supported range is 8000-48000 Hz)");
    }
}

} // namespace

WavFile read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    char tag[4];
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw IoError(path.string() + ": not a RIFF file");
    read_le<std::uint32_t>(in); // overall size, unused
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw IoError(path.string() + ": not a WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::vector<char> data;
    bool have_fmt = false, have_data = false;

    while (in) {
        in.read(tag, 4);
        if (!in) break;
        const auto size = read_le<std::uint32_t>(in);
        if (!in) break;
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (size < 16) throw IoError(path.string() + ": malformed fmt chunk");
            format = read_le<std::uint16_t>(in);
            channels = read_le<std::uint16_t>(in);
            rate = read_le<std::uint32_t>(in);
            read_le<std::uint32_t>(in); // byte rate
            read_le<std::uint16_t>(in); // block align
            bits = read_le<std::uint16_t>(in);
            in.seekg(size - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data.resize(size);
            in.read(data.data(), size);
            if (!in) throw IoError(path.string() + ": truncated data chunk");
            have_data = true;
        } else {
            in.seekg(size, std::ios::cur);
        }
        if (size % 2 == 1) in.seekg(1, std::ios::cur); // chunks are word aligned
    }

    if (!have_fmt || !have_data) throw IoError(path.string() + ": missing fmt or data chunk");
    if (channels == 0) throw IoError(path.string() + ": zero channels");
    check_rate(static_cast<int>(rate));

    WavFile wav;
    wav.audio.sample_rate = static_cast<int>(rate);

    if (format == kFormatPcm && bits == 16) {
        wav.format = WavFormat::pcm16;
        const std::size_t n_samples = data.size() / 2;
        const std::size_t n_frames = n_samples / channels;
        wav.audio.channels.assign(channels, std::vector<float>(n_frames));
        const char* p = data.data();
        for (std::size_t i = 0; i < n_frames; ++i) {
            for (std::uint16_t c = 0; c < channels; ++c) {
                std::int16_t v;
                std::memcpy(&v, p, 2);
                p += 2;
                wav.audio.channels[c][i] = pcm16_to_float(v);
            }
        }
    } else if (format == kFormatIeeeFloat && bits == 32) {
        wav.format = WavFormat::float32;
        const std::size_t n_samples = data.size() / 4;
        const std::size_t n_frames = n_samples / channels;
        wav.audio.channels.assign(channels, std::vector<float>(n_frames));
        const char* p = data.data();
        for (std::size_t i = 0; i < n_frames; ++i) {
            for (std::uint16_t c = 0; c < channels; ++c) {
                float v;
                std::memcpy(&v, p, 4);
                p += 4;
                wav.audio.channels[c][i] = v;
            }
        }
    } else {
        throw IoError(path.string() + ": unsupported format (want PCM16 or float32, got format " +
                      std::to_string(format) + ", " + std::to_string(bits) + " bits)");
    }
    return wav;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio, WavFormat format) {
    if (audio.num_channels() == 0) throw IoError("write_wav: no channels");
    check_rate(audio.sample_rate);
    for (const auto& ch : audio.channels) {
        if (ch.size() != audio.num_frames()) throw IoError("write_wav: ragged channel lengths");
    }

    const auto channels = static_cast<std::uint16_t>(audio.num_channels());
    const auto n_frames = static_cast<std::uint32_t>(audio.num_frames());
    const std::uint16_t bytes_per_sample = format == WavFormat::pcm16 ? 2 : 4;
    const std::uint32_t data_size = n_frames * channels * bytes_per_sample;

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");

        out.write("RIFF", 4);
        write_le<std::uint32_t>(out, 36 + data_size);
        out.write("WAVE", 4);
        out.write("fmt ", 4);
        write_le<std::uint32_t>(out, 16);
        write_le<std::uint16_t>(out, format == WavFormat::pcm16 ? kFormatPcm : kFormatIeeeFloat);
        write_le<std::uint16_t>(out, channels);
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate));
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate) * channels *
                                         bytes_per_sample);
        write_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
        write_le<std::uint16_t>(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
        out.write("data", 4);
        write_le<std::uint32_t>(out, data_size);

        for (std::uint32_t i = 0; i < n_frames; ++i) {
            for (std::uint16_t c = 0; c < channels; ++c) {
                const float v = audio.channels[c][i];
                if (format == WavFormat::pcm16) {
                    write_le<std::int16_t>(out, float_to_pcm16(v));
                } else {
                    write_le<float>(out, v);
                }
            }
        }
        if (!out) throw IoError("failed writing " + tmp.string());
    }

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("failed to move " + tmp.string() + " into place: " + ec.message());
    }
}

} // namespace scald
