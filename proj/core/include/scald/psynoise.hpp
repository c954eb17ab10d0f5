#pragma once

#include "scald/rng.hpp"
#include "scald/window.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace scald {

// Critical-band rate (Bark) of a frequency in Hz.
double bark_of_hz(double freq_hz);

// Partition of rfft bins 0..L/2 into integer-Bark bands (25 bands at 44.1 kHz).
struct BarkBands {
    int fft_size = 0;
    int sample_rate = 0;
    std::vector<int> band_of_bin;               // size fft_size/2 + 1
    std::vector<std::pair<int, int>> bin_range; // inclusive [first, last] per band
    std::vector<double> center_hz;

    int num_bands() const { return static_cast<int>(bin_range.size()); }
};

BarkBands make_bark_bands(int fft_size, int sample_rate);

// Allowed noise power per Bark band for one analysis window, in the same
// mean-square units as the input spectrum.
struct MaskingThreshold {
    std::vector<double> band_energies;
    long frame_index = 0;
};

struct NoiseInjectorConfig {
    WindowSpec window{};
    double lowband_emphasis_db = 6.0;   // extra allowance below 1.5 kHz
    double highband_rolloff_db = -12.0; // reduction above 2 kHz
    double threshold_offset_db = -18.0; // distance below the spread masker; -inf disables
    std::uint64_t seed = 1;

    void validate() const;
};

// Per-bin mean-square power of one analysis-windowed frame, normalized so the
// band sums estimate E{x^2}: p(k) = m_k |X_k|^2 * 2 / L^2 with m_k = 1 at DC
// and Nyquist, 2 elsewhere.
std::vector<double> frame_power_spectrum(std::span<const double> windowed_frame);

// Spread band energies across Bark bands (+25 dB/Bark toward lower bands,
// -10 dB/Bark toward higher), apply the offset and the low/high shaping.
// Linear in input power; a silent frame maps to all-zero thresholds.
MaskingThreshold compute_masking_threshold(std::span<const double> bin_power,
                                           const BarkBands& bands,
                                           const NoiseInjectorConfig& cfg, long frame_index);

// Frequency-domain synthesis: deterministic per-band magnitudes at the
// threshold, uniform random phases, inverse transform, synthesis window
// applied once. Returns a frame of window length.
std::vector<double> generate_masked_noise(const MaskingThreshold& threshold,
                                          const BarkBands& bands, std::span<const double> window,
                                          Rng& rng);

// Masked-noise injection for one channel. The noise path is assembled by
// overlap-add of windowed noise frames and added one hop late, so the signal
// itself is never delayed: out(n) = in(n) + noise(n - hop).
class NoiseInjector {
public:
    NoiseInjector(const NoiseInjectorConfig& cfg, int sample_rate);

    std::vector<float> process(std::span<const float> input);

    const BarkBands& bands() const { return bands_; }

    // Undelayed noise path from the last process() call, same length as the
    // input; out = in + delay(noise_stream, hop).
    const std::vector<float>& noise_stream() const { return noise_stream_; }

    struct DumpRow {
        long frame;
        int band;
        double threshold_db;
        double injected_db;
    };
    void set_dump_enabled(bool on) { dump_enabled_ = on; }
    const std::vector<DumpRow>& dump_rows() const { return dump_rows_; }

private:
    std::vector<double> guarded_bin_targets(const MaskingThreshold& thr) const;

    NoiseInjectorConfig cfg_;
    BarkBands bands_;
    std::vector<double> window_;
    // smear_[band][bin]: fraction of a synthesis bin's power that lands in
    // each Bark band once the synthesis window has spread it
    std::vector<std::vector<double>> smear_;
    bool dump_enabled_ = false;
    std::vector<DumpRow> dump_rows_;
    std::vector<float> noise_stream_;
};

std::vector<float> inject_noise(const NoiseInjectorConfig& cfg, std::span<const float> input,
                                int sample_rate);

// CSV rows "frame,band,threshold_db,injected_db".
void write_threshold_csv(std::ostream& os, std::span<const NoiseInjector::DumpRow> rows);

} // namespace scald
