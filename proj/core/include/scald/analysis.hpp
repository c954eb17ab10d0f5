#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace scald {

// Squared inter-channel coherence per frequency bin,
// gamma^2(f) = |E{X1*(f) X2(f)}|^2 / (E{|X1(f)|^2} E{|X2(f)|^2}),
// with the expectation realized as a Welch average over Hann-windowed,
// 50%-overlapped blocks.
struct CoherenceSpectrum {
    std::vector<double> gamma_sq; // bins 0 .. fft_size/2
    int fft_size = 0;
    int n_blocks = 0;
    int sample_rate = 0;

    double bin_hz(int bin) const {
        return static_cast<double>(bin) * sample_rate / fft_size;
    }
};

// Requires n_blocks >= 2 (a single block gives gamma^2 == 1 identically) and
// enough data for n_blocks overlapped blocks; throws ConfigError otherwise.
CoherenceSpectrum coherence(std::span<const float> x1, std::span<const float> x2, int fft_size,
                            int n_blocks, int sample_rate);

// Unweighted mean of gamma^2 over bins with f_lo <= f < f_hi (f_hi == Nyquist
// includes the Nyquist bin). Empty band -> ConfigError.
double band_average(const CoherenceSpectrum& spec, double f_lo_hz, double f_hi_hz);

// Normalized misalignment ||h_true - h_est||^2 / ||h_true||^2 in dB.
// The shorter vector is zero-padded; all-zero h_true -> ConfigError.
// Exact match is floored at -200 dB.
double misalignment_db(std::span<const double> h_true, std::span<const double> h_est);

struct MisalignmentTrace {
    std::vector<double> time_s;
    std::vector<double> eta_db;
    int filter_length = 0;

    double final_db() const { return eta_db.empty() ? 0.0 : eta_db.back(); }
};

// CSV emitters, plot-ready: "frequency_hz,gamma_sq" and "time_s,eta_db".
void write_coherence_csv(std::ostream& os, const CoherenceSpectrum& spec);
void write_trace_csv(std::ostream& os, const MisalignmentTrace& trace);

} // namespace scald
