#pragma once

#include "scald/audio.hpp"

#include <filesystem>

namespace scald {

enum class WavFormat { pcm16, float32 };

struct WavFile {
    AudioBuffer audio;
    WavFormat format = WavFormat::pcm16;
};

// RIFF/WAVE reader for PCM16 and IEEE float32, any channel count, 8-48 kHz.
// Unknown chunks are skipped; malformed or unsupported files raise IoError.
WavFile read_wav(const std::filesystem::path& path);

// Writes via a temporary file and an atomic rename, so a failed run never
// leaves a partial output behind.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio, WavFormat format);

} // namespace scald
