#include "scald/analysis.hpp"

#include "scald/errors.hpp"
#include "scald/fft.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <string>

namespace scald {

CoherenceSpectrum coherence(std::span<const float> x1, std::span<const float> x2, int fft_size,
                            int n_blocks, int sample_rate) {
    if (x1.size() != x2.size()) {
        throw ConfigError("coherence: channel lengths differ");
    }
    if (n_blocks < 2) {
        throw ConfigError("coherence: need n_blocks >= 2, a single block is identically 1");
    }
    if (fft_size < 4 || !is_power_of_two(static_cast<std::size_t>(fft_size))) {
        throw ConfigError("coherence: fft_size must be a power of two >= 4");
    }
    const std::size_t hop = static_cast<std::size_t>(fft_size) / 2;
    const std::size_t need = (static_cast<std::size_t>(n_blocks) - 1) * hop +
                             static_cast<std::size_t>(fft_size);
    if (x1.size() < need) {
        throw ConfigError("coherence: insufficient data: need " + std::to_string(need) +
                          " samples for " + std::to_string(n_blocks) + " blocks, got " +
                          std::to_string(x1.size()));
    }

    std::vector<double> window(static_cast<std::size_t>(fft_size));
    for (int i = 0; i < fft_size; ++i) {
        window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / fft_size);
    }

    const std::size_t n_bins = static_cast<std::size_t>(fft_size) / 2 + 1;
    std::vector<std::complex<double>> cross(n_bins, {0.0, 0.0});
    std::vector<double> p1(n_bins, 0.0), p2(n_bins, 0.0);
    std::vector<double> buf(static_cast<std::size_t>(fft_size));

    for (int b = 0; b < n_blocks; ++b) {
        const std::size_t start = static_cast<std::size_t>(b) * hop;
        for (int i = 0; i < fft_size; ++i) {
            buf[static_cast<std::size_t>(i)] =
                window[static_cast<std::size_t>(i)] * x1[start + static_cast<std::size_t>(i)];
        }
        const auto s1 = rfft(buf);
        for (int i = 0; i < fft_size; ++i) {
            buf[static_cast<std::size_t>(i)] =
                window[static_cast<std::size_t>(i)] * x2[start + static_cast<std::size_t>(i)];
        }
        const auto s2 = rfft(buf);
        for (std::size_t k = 0; k < n_bins; ++k) {
            cross[k] += std::conj(s1[k]) * s2[k];
            p1[k] += std::norm(s1[k]);
            p2[k] += std::norm(s2[k]);
        }
    }

    CoherenceSpectrum spec;
    spec.fft_size = fft_size;
    spec.n_blocks = n_blocks;
    spec.sample_rate = sample_rate;
    spec.gamma_sq.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double denom = p1[k] * p2[k];
        spec.gamma_sq[k] = denom > 0.0 ? std::norm(cross[k]) / denom : 0.0;
    }
    return spec;
}

double band_average(const CoherenceSpectrum& spec, double f_lo_hz, double f_hi_hz) {
    const double nyquist = 0.5 * spec.sample_rate;
    if (!(f_lo_hz >= 0.0 && f_lo_hz < f_hi_hz && f_hi_hz <= nyquist)) {
        throw ConfigError("band_average: need 0 <= f_lo < f_hi <= Nyquist");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < spec.gamma_sq.size(); ++k) {
        const double f = spec.bin_hz(static_cast<int>(k));
        const bool in_band = (f >= f_lo_hz && f < f_hi_hz) || (f == f_hi_hz && f_hi_hz == nyquist);
        if (in_band) {
            sum += spec.gamma_sq[k];
            ++count;
        }
    }
    if (count == 0) {
        throw ConfigError("band_average: no bins in [" + std::to_string(f_lo_hz) + ", " +
                          std::to_string(f_hi_hz) + ") Hz");
    }
    return sum / static_cast<double>(count);
}

double misalignment_db(std::span<const double> h_true, std::span<const double> h_est) {
    const std::size_t n = std::max(h_true.size(), h_est.size());
    double energy = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i < h_true.size() ? h_true[i] : 0.0;
        const double e = i < h_est.size() ? h_est[i] : 0.0;
        energy += t * t;
        err += (t - e) * (t - e);
    }
    if (energy <= 0.0) {
        throw ConfigError("misalignment: reference response has zero energy");
    }
    const double eta = err / energy;
    constexpr double floor_db = -200.0;
    if (eta <= 0.0) return floor_db;
    return std::max(10.0 * std::log10(eta), floor_db);
}

void write_coherence_csv(std::ostream& os, const CoherenceSpectrum& spec) {
    os << "frequency_hz,gamma_sq\n";
    for (std::size_t k = 0; k < spec.gamma_sq.size(); ++k) {
        os << spec.bin_hz(static_cast<int>(k)) << ',' << spec.gamma_sq[k] << '\n';
    }
}

void write_trace_csv(std::ostream& os, const MisalignmentTrace& trace) {
    os << "time_s,eta_db\n";
    for (std::size_t i = 0; i < trace.time_s.size(); ++i) {
        os << trace.time_s[i] << ',' << trace.eta_db[i] << '\n';
    }
}

} // namespace scald
