#include "scald/psynoise.hpp"

#include "scald/errors.hpp"
#include "scald/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>

namespace scald {

namespace {

constexpr double kLowbandEdgeHz = 1500.0;
constexpr double kHighbandEdgeHz = 2000.0;
constexpr double kLowerSlopeDbPerBark = 25.0;
constexpr double kUpperSlopeDbPerBark = 10.0;

double db_to_power(double db) {
    if (std::isinf(db) && db < 0.0) return 0.0;
    return std::pow(10.0, db / 10.0);
}

double power_to_db(double p) { return p > 0.0 ? 10.0 * std::log10(p) : -300.0; }

} // namespace

double bark_of_hz(double freq_hz) {
    return 13.0 * std::atan(0.00076 * freq_hz) +
           3.5 * std::atan((freq_hz / 7500.0) * (freq_hz / 7500.0));
}

BarkBands make_bark_bands(int fft_size, int sample_rate) {
    if (fft_size < 4 || fft_size % 2 != 0) {
        throw ConfigError("bark bands: fft_size must be even and >= 4");
    }
    BarkBands bands;
    bands.fft_size = fft_size;
    bands.sample_rate = sample_rate;
    const int n_bins = fft_size / 2 + 1;
    bands.band_of_bin.resize(static_cast<std::size_t>(n_bins));

    const int n_bands = static_cast<int>(std::floor(bark_of_hz(0.5 * sample_rate))) + 1;
    bands.bin_range.assign(static_cast<std::size_t>(n_bands), {-1, -1});

    for (int k = 0; k < n_bins; ++k) {
        const double f = static_cast<double>(k) * sample_rate / fft_size;
        int band = static_cast<int>(std::floor(bark_of_hz(f)));
        band = std::clamp(band, 0, n_bands - 1);
        bands.band_of_bin[static_cast<std::size_t>(k)] = band;
        auto& range = bands.bin_range[static_cast<std::size_t>(band)];
        if (range.first < 0) range.first = k;
        range.second = k;
    }

    // Bark is monotone in frequency, so every band is a contiguous bin range;
    // drop any empty trailing bands (possible at coarse resolutions).
    while (!bands.bin_range.empty() && bands.bin_range.back().first < 0) {
        bands.bin_range.pop_back();
    }
    for (auto& range : bands.bin_range) {
        if (range.first < 0) {
            throw ConfigError("bark bands: fft resolution too coarse for the band layout");
        }
    }

    bands.center_hz.resize(bands.bin_range.size());
    for (std::size_t b = 0; b < bands.bin_range.size(); ++b) {
        const double f_lo = bands.bin_range[b].first * static_cast<double>(sample_rate) / fft_size;
        const double f_hi = bands.bin_range[b].second * static_cast<double>(sample_rate) / fft_size;
        bands.center_hz[b] = 0.5 * (f_lo + f_hi);
    }
    return bands;
}

void NoiseInjectorConfig::validate() const {
    make_window(window);
    if (std::isnan(threshold_offset_db) || threshold_offset_db > 0.0) {
        throw ConfigError("psynoise: threshold_offset_db must be <= 0 (or -inf to disable)");
    }
    if (!std::isfinite(lowband_emphasis_db) || !std::isfinite(highband_rolloff_db)) {
        throw ConfigError("psynoise: emphasis and rolloff must be finite");
    }
}

std::vector<double> frame_power_spectrum(std::span<const double> windowed_frame) {
    const std::size_t L = windowed_frame.size();
    const auto spec = rfft(windowed_frame);
    std::vector<double> power(spec.size());
    // 4/L^2 = one-sided Parseval (2/L^2) times the 1/2 analysis-window power,
    // so the band sums estimate the mean square of the unwindowed stream
    const double scale = 4.0 / (static_cast<double>(L) * static_cast<double>(L));
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double m = (k == 0 || k == L / 2) ? 0.5 : 1.0;
        power[k] = scale * m * std::norm(spec[k]);
    }
    return power;
}

MaskingThreshold compute_masking_threshold(std::span<const double> bin_power,
                                           const BarkBands& bands,
                                           const NoiseInjectorConfig& cfg, long frame_index) {
    if (bin_power.size() != bands.band_of_bin.size()) {
        throw ConfigError("masking threshold: spectrum size does not match the band layout");
    }
    const int n_bands = bands.num_bands();
    std::vector<double> band_energy(static_cast<std::size_t>(n_bands), 0.0);
    for (std::size_t k = 0; k < bin_power.size(); ++k) {
        band_energy[static_cast<std::size_t>(bands.band_of_bin[k])] += bin_power[k];
    }

    const double offset = db_to_power(cfg.threshold_offset_db);

    MaskingThreshold thr;
    thr.frame_index = frame_index;
    thr.band_energies.assign(static_cast<std::size_t>(n_bands), 0.0);
    for (int b = 0; b < n_bands; ++b) {
        double spread = 0.0;
        for (int j = 0; j < n_bands; ++j) {
            const double dist = static_cast<double>(b - j);
            const double atten_db =
                dist >= 0.0 ? kUpperSlopeDbPerBark * dist : kLowerSlopeDbPerBark * (-dist);
            spread += band_energy[static_cast<std::size_t>(j)] * db_to_power(-atten_db);
        }
        // emphasis below 1.5 kHz, rolloff above 2 kHz, Bark-linear ramp
        // between the edges so the allocation has no cliff
        const double center = bands.center_hz[static_cast<std::size_t>(b)];
        double shape_db;
        if (center <= kLowbandEdgeHz) {
            shape_db = cfg.lowband_emphasis_db;
        } else if (center >= kHighbandEdgeHz) {
            shape_db = cfg.highband_rolloff_db;
        } else {
            const double t = (bark_of_hz(center) - bark_of_hz(kLowbandEdgeHz)) /
                             (bark_of_hz(kHighbandEdgeHz) - bark_of_hz(kLowbandEdgeHz));
            shape_db = cfg.lowband_emphasis_db +
                       t * (cfg.highband_rolloff_db - cfg.lowband_emphasis_db);
        }
        thr.band_energies[static_cast<std::size_t>(b)] = spread * offset * db_to_power(shape_db);
    }
    return thr;
}

namespace {

// Uniform split of each band's threshold over its usable bins (DC and
// Nyquist stay silent), in per-bin mean-square units.
std::vector<double> uniform_bin_targets(const MaskingThreshold& threshold, const BarkBands& bands,
                                        std::size_t L) {
    std::vector<double> targets(L / 2 + 1, 0.0);
    for (int b = 0; b < bands.num_bands(); ++b) {
        const double target = threshold.band_energies[static_cast<std::size_t>(b)];
        if (target <= 0.0) continue;
        const auto [first, last] = bands.bin_range[static_cast<std::size_t>(b)];
        const int lo = std::max(first, 1);
        const int hi = std::min(last, static_cast<int>(L / 2) - 1);
        const int usable = hi - lo + 1;
        if (usable <= 0) continue;
        for (int k = lo; k <= hi; ++k) {
            targets[static_cast<std::size_t>(k)] = target / static_cast<double>(usable);
        }
    }
    return targets;
}

// Pre-window noise frame carrying the given per-bin mean-square powers with
// deterministic magnitudes and random phases.
std::vector<double> synth_noise_frame(std::span<const double> bin_targets, std::size_t L,
                                      Rng& rng) {
    std::vector<std::complex<double>> spec(L / 2 + 1, {0.0, 0.0});
    for (std::size_t k = 1; k + 1 < spec.size(); ++k) {
        if (bin_targets[k] <= 0.0) continue;
        const double mag = std::sqrt(bin_targets[k] * static_cast<double>(L) *
                                     static_cast<double>(L) / 2.0);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        spec[k] = std::polar(mag, phase);
    }
    return irfft(spec, L);
}

// Band powers of a raw (unwindowed) frame, same units as the thresholds.
std::vector<double> raw_band_power(std::span<const double> frame, const BarkBands& bands) {
    const std::size_t L = frame.size();
    const auto spec = rfft(frame);
    std::vector<double> out(static_cast<std::size_t>(bands.num_bands()), 0.0);
    const double scale = 2.0 / (static_cast<double>(L) * static_cast<double>(L));
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double m = (k == 0 || k == L / 2) ? 0.5 : 1.0;
        out[static_cast<std::size_t>(bands.band_of_bin[k])] += scale * m * std::norm(spec[k]);
    }
    return out;
}

} // namespace

std::vector<double> generate_masked_noise(const MaskingThreshold& threshold,
                                          const BarkBands& bands, std::span<const double> window,
                                          Rng& rng) {
    const std::size_t L = window.size();
    if (static_cast<int>(L) != bands.fft_size) {
        throw ConfigError("generate_masked_noise: window does not match the band layout");
    }
    const auto targets = uniform_bin_targets(threshold, bands, L);
    std::vector<double> frame = synth_noise_frame(targets, L, rng);
    for (std::size_t i = 0; i < L; ++i) frame[i] *= window[i];
    return frame;
}

NoiseInjector::NoiseInjector(const NoiseInjectorConfig& cfg, int sample_rate)
    : cfg_(cfg), bands_(make_bark_bands(cfg.window.length, sample_rate)),
      window_(make_window(cfg.window)) {
    cfg_.validate();

    // Smear matrix: where a synthesis bin's power is measured once the
    // synthesis window (applied once) has spread it. Evaluated on a 16x
    // zero-padded grid, negative-frequency image included.
    const int L = cfg_.window.length;
    const int pad = 16;
    const std::size_t P = static_cast<std::size_t>(pad) * static_cast<std::size_t>(L);
    std::vector<std::complex<double>> w_fine(P, {0.0, 0.0});
    for (int i = 0; i < L; ++i) w_fine[static_cast<std::size_t>(i)] = {window_[static_cast<std::size_t>(i)], 0.0};
    fft(w_fine);
    std::vector<double> kernel(P);
    for (std::size_t j = 0; j < P; ++j) kernel[j] = std::norm(w_fine[j]);

    const int n_bins = L / 2 + 1;
    const int n_fine = static_cast<int>(P) / 2 + 1;
    std::vector<int> fine_band(static_cast<std::size_t>(n_fine));
    for (int j = 0; j < n_fine; ++j) {
        const double f = static_cast<double>(j) * sample_rate / static_cast<double>(P);
        fine_band[static_cast<std::size_t>(j)] =
            std::min(static_cast<int>(std::floor(bark_of_hz(f))), bands_.num_bands() - 1);
    }

    smear_.assign(static_cast<std::size_t>(bands_.num_bands()),
                  std::vector<double>(static_cast<std::size_t>(n_bins), 0.0));
    for (int k = 1; k + 1 < n_bins; ++k) {
        double total = 0.0;
        std::vector<double> per_band(static_cast<std::size_t>(bands_.num_bands()), 0.0);
        for (int j = 0; j < n_fine; ++j) {
            const std::size_t d1 = static_cast<std::size_t>(((j - k * pad) % static_cast<int>(P) +
                                                             static_cast<int>(P)) %
                                                            static_cast<int>(P));
            const std::size_t d2 = static_cast<std::size_t>((j + k * pad) % static_cast<int>(P));
            const double e = kernel[d1] + kernel[d2];
            per_band[static_cast<std::size_t>(fine_band[static_cast<std::size_t>(j)])] += e;
            total += e;
        }
        if (total <= 0.0) continue;
        for (int b = 0; b < bands_.num_bands(); ++b) {
            smear_[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] =
                per_band[static_cast<std::size_t>(b)] / total;
        }
    }
}

std::vector<double> NoiseInjector::guarded_bin_targets(const MaskingThreshold& thr) const {
    const auto L = static_cast<std::size_t>(cfg_.window.length);
    auto targets = uniform_bin_targets(thr, bands_, L);
    const int n_bands = bands_.num_bands();
    const int n_bins = static_cast<int>(L) / 2 + 1;

    // Iteratively scale down bins whose smeared energy would overflow a
    // band's ceiling; scaling only ever reduces, so the loop is monotone.
    std::vector<double> measured(static_cast<std::size_t>(n_bands));
    for (int iter = 0; iter < 4; ++iter) {
        std::fill(measured.begin(), measured.end(), 0.0);
        for (int b = 0; b < n_bands; ++b) {
            const auto& row = smear_[static_cast<std::size_t>(b)];
            double acc = 0.0;
            for (int k = 1; k + 1 < n_bins; ++k) {
                acc += row[static_cast<std::size_t>(k)] * targets[static_cast<std::size_t>(k)];
            }
            measured[static_cast<std::size_t>(b)] = acc;
        }
        bool any_violation = false;
        std::vector<double> band_ratio(static_cast<std::size_t>(n_bands), 1.0);
        for (int b = 0; b < n_bands; ++b) {
            const double ceiling = thr.band_energies[static_cast<std::size_t>(b)];
            const double m = measured[static_cast<std::size_t>(b)];
            if (m > ceiling) {
                band_ratio[static_cast<std::size_t>(b)] = ceiling > 0.0 ? ceiling / m : 0.0;
                any_violation = true;
            }
        }
        if (!any_violation) break;
        for (int k = 1; k + 1 < n_bins; ++k) {
            if (targets[static_cast<std::size_t>(k)] <= 0.0) continue;
            double factor = 1.0;
            for (int b = 0; b < n_bands; ++b) {
                // only bands this bin feeds appreciably constrain it
                if (smear_[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] > 0.02) {
                    factor = std::min(factor, band_ratio[static_cast<std::size_t>(b)]);
                }
            }
            targets[static_cast<std::size_t>(k)] *= factor;
        }
    }
    return targets;
}

std::vector<float> NoiseInjector::process(std::span<const float> input) {
    const int L = cfg_.window.length;
    const int hop = cfg_.window.hop();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());

    Rng rng(cfg_.seed);
    dump_rows_.clear();
    noise_stream_.assign(input.size(), 0.0f);
    std::vector<double> acc(input.size(), 0.0);
    std::vector<double> frame(static_cast<std::size_t>(L));

    long frame_index = 0;
    for (std::ptrdiff_t start = -hop; start < n; start += hop, ++frame_index) {
        for (int j = 0; j < L; ++j) {
            const std::ptrdiff_t pos = start + j;
            const double x = (pos >= 0 && pos < n) ? input[static_cast<std::size_t>(pos)] : 0.0;
            frame[static_cast<std::size_t>(j)] = window_[static_cast<std::size_t>(j)] * x;
        }

        const auto power = frame_power_spectrum(frame);
        const auto thr = compute_masking_threshold(power, bands_, cfg_, frame_index);

        const bool audible = std::any_of(thr.band_energies.begin(), thr.band_energies.end(),
                                         [](double e) { return e > 0.0; });
        std::vector<double> noise;
        if (audible) {
            const auto targets = guarded_bin_targets(thr);
            noise = synth_noise_frame(targets, static_cast<std::size_t>(L), rng);
            for (int j = 0; j < L; ++j) {
                const std::ptrdiff_t pos = start + j;
                if (pos >= 0 && pos < n) {
                    acc[static_cast<std::size_t>(pos)] +=
                        window_[static_cast<std::size_t>(j)] * noise[static_cast<std::size_t>(j)];
                }
            }
        }

        if (dump_enabled_) {
            // injected = exact synthesized band power of the pre-window frame;
            // the overlap-add of the twice-hit Princen-Bradley window carries
            // it to the stream unchanged in expectation
            std::vector<double> injected(static_cast<std::size_t>(bands_.num_bands()), 0.0);
            if (audible) injected = raw_band_power(noise, bands_);
            for (int b = 0; b < bands_.num_bands(); ++b) {
                dump_rows_.push_back({frame_index, b,
                                      power_to_db(thr.band_energies[static_cast<std::size_t>(b)]),
                                      power_to_db(injected[static_cast<std::size_t>(b)])});
            }
        }
    }

    std::vector<float> out(input.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        noise_stream_[static_cast<std::size_t>(i)] = static_cast<float>(acc[static_cast<std::size_t>(i)]);
        const std::ptrdiff_t delayed = i - hop;
        if (delayed >= 0 && acc[static_cast<std::size_t>(delayed)] != 0.0) {
            out[static_cast<std::size_t>(i)] = static_cast<float>(
                input[static_cast<std::size_t>(i)] + acc[static_cast<std::size_t>(delayed)]);
        } else {
            out[static_cast<std::size_t>(i)] = input[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

std::vector<float> inject_noise(const NoiseInjectorConfig& cfg, std::span<const float> input,
                                int sample_rate) {
    NoiseInjector injector(cfg, sample_rate);
    return injector.process(input);
}

void write_threshold_csv(std::ostream& os, std::span<const NoiseInjector::DumpRow> rows) {
    os << "frame,band,threshold_db,injected_db\n";
    for (const auto& r : rows) {
        os << r.frame << ',' << r.band << ',' << r.threshold_db << ',' << r.injected_db << '\n';
    }
}

} // namespace scald
