#pragma once

#include "scald/analysis.hpp"
#include "scald/audio.hpp"
#include "scald/pipeline.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace scald {

struct ImpulseResponse {
    std::vector<float> taps;
    int sample_rate = 0;
    std::string label;
};

// Synthetic room response: a direct-path spike at a small random delay
// followed by an exponentially decaying noise tail whose energy envelope
// reaches -60 dB at rt60_ms.
ImpulseResponse synth_room_ir(double rt60_ms, int length_taps, int sample_rate,
                              std::uint64_t seed, std::string label = {});

// Remote-room pickup: one source played into a stereo microphone pair.
AudioBuffer simulate_remote(std::span<const float> source, const ImpulseResponse& left,
                            const ImpulseResponse& right, int sample_rate);

// Multidelay block frequency-domain adaptive filter, per-bin normalized step,
// constrained weight updates, any number of far-end channels sharing one
// error signal.
struct MdfConfig {
    int filter_length = 1024;
    int block_size = 256;
    double learning_rate = 0.5;
    double regularization = 1e-3; // relative per-bin power floor

    void validate() const;
};

class StereoMdf {
public:
    StereoMdf(const MdfConfig& cfg, int num_channels);

    // Consumes one block per far channel plus the matching mic block and
    // returns the error (echo-cancelled) block.
    std::vector<float> step(const std::vector<std::span<const float>>& far_blocks,
                            std::span<const float> mic_block);

    // Current time-domain estimate, filter_length taps.
    std::vector<double> estimated_taps(int channel) const;

    int num_channels() const { return num_channels_; }
    int block_size() const { return cfg_.block_size; }

private:
    MdfConfig cfg_;
    int num_channels_;
    int num_partitions_;
    int fft_size_;
    // [channel][partition][bin]; partition 0 holds the newest block's spectrum
    std::vector<std::vector<std::vector<std::complex<double>>>> x_spec_;
    std::vector<std::vector<std::vector<std::complex<double>>>> weights_;
    std::vector<std::vector<double>> prev_block_;
};

struct NearEndSetup {
    std::vector<ImpulseResponse> speaker_to_mic; // one response per far channel
    double snr_db = 40.0;                        // +inf disables the background noise
    std::uint64_t noise_seed = 1;
};

// Mic signal: sum of speaker->mic convolutions plus white noise scaled so the
// echo-to-noise power ratio equals snr_db exactly.
std::vector<float> render_near_mic(const AudioBuffer& far, const NearEndSetup& near);

// Runs the adaptive filter over far/mic and samples misalignment between the
// estimated taps and h_true (the per-channel true responses, concatenated,
// filter_length taps each) at the given interval. Throws NumericError if
// misalignment rises more than 20 dB above its running minimum.
MisalignmentTrace cancel_stream(const AudioBuffer& far, std::span<const float> mic,
                                std::span<const double> h_true, const MdfConfig& aec,
                                double interval_s);

// render_near_mic + cancel_stream against the near responses truncated to the
// adaptive filter length.
MisalignmentTrace simulate_near_and_cancel(const AudioBuffer& far, const NearEndSetup& near,
                                           const MdfConfig& aec, double interval_s = 0.5);

struct SimMaterial {
    std::string name;
    std::vector<float> samples; // mono source
};

struct SimAlgorithm {
    std::string name;
    DecorrelatorConfig decorrelator;
};

struct EchoSimConfig {
    int sample_rate = 16000;
    double duration_s = 10.0;
    double snr_db = 40.0;
    double remote_rt60_ms = 60.0;
    int remote_ir_length = 2048;
    double near_rt60_ms = 200.0;
    int near_ir_length = 1024;
    MdfConfig aec{};
    double misalignment_interval_s = 0.5;
    std::uint64_t seed = 42;
    bool mono = false;          // single-channel sanity mode
    std::string debug_dump_dir; // when set, per-run far/mic WAVs land here

    void validate() const;
};

struct RunResult {
    std::string algorithm;
    std::string material;
    double final_misalignment_db = 0.0;
    double band_coherence = 1.0; // far-pair gamma^2 averaged over 2 kHz .. min(20 kHz, Nyquist)
    double runtime_s = 0.0;
    MisalignmentTrace trace;
};

struct ComparisonReport {
    EchoSimConfig config;
    std::vector<RunResult> runs;
};

// The full evaluation loop: per (algorithm, material), simulate the remote
// pickup, decorrelate, simulate the near end and cancel. Deterministic up to
// the runtime fields.
ComparisonReport run_comparison(const EchoSimConfig& cfg,
                                const std::vector<SimAlgorithm>& algorithms,
                                const std::vector<SimMaterial>& materials);

} // namespace scald
