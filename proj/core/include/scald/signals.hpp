#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace scald {

// Deterministic test/material generators. All are pure functions of their
// arguments; the RNG-backed ones use the toolkit RNG, not <random>.

std::vector<float> white_noise(std::size_t n, std::uint64_t seed, float rms = 0.25f);

// -3 dB/octave via the three-pole Kellet filter, rescaled to the target rms.
std::vector<float> pink_noise(std::size_t n, std::uint64_t seed, float rms = 0.25f);

std::vector<float> sine(std::size_t n, double freq_hz, int sample_rate, double amplitude = 0.5,
                        double phase = 0.0);

// Voiced-speech stand-in: jittered glottal pulse train through three formant
// resonators plus breath noise, with a syllabic amplitude envelope. Broadband
// up to Nyquist, which matters for coherence measurements.
std::vector<float> speech_like(std::size_t n, int sample_rate, std::uint64_t seed,
                               float rms = 0.15f);

} // namespace scald
