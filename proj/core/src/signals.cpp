#include "scald/signals.hpp"

#include "scald/rng.hpp"

#include <cmath>

namespace scald {

namespace {

void rescale_rms(std::vector<float>& x, float target_rms) {
    double sum = 0.0;
    for (float v : x) sum += static_cast<double>(v) * v;
    if (sum <= 0.0 || x.empty()) return;
    const double scale = target_rms / std::sqrt(sum / static_cast<double>(x.size()));
    for (auto& v : x) v = static_cast<float>(v * scale);
}

struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0, z2 = 0.0;

    double tick(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }
};

Biquad resonator(double freq_hz, double q, int sample_rate) {
    const double w0 = 2.0 * M_PI * freq_hz / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad b{};
    b.b0 = alpha / a0;
    b.b1 = 0.0;
    b.b2 = -alpha / a0;
    b.a1 = -2.0 * std::cos(w0) / a0;
    b.a2 = (1.0 - alpha) / a0;
    return b;
}

} // namespace

std::vector<float> white_noise(std::size_t n, std::uint64_t seed, float rms) {
    Rng rng(seed);
    std::vector<float> out(n);
    for (auto& v : out) v = static_cast<float>(rms * rng.normal());
    return out;
}

std::vector<float> pink_noise(std::size_t n, std::uint64_t seed, float rms) {
    Rng rng(seed);
    std::vector<float> out(n);
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (auto& v : out) {
        const double w = rng.normal();
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        v = static_cast<float>(b0 + b1 + b2 + w * 0.1848);
    }
    rescale_rms(out, rms);
    return out;
}

std::vector<float> sine(std::size_t n, double freq_hz, int sample_rate, double amplitude,
                        double phase) {
    std::vector<float> out(n);
    const double step = 2.0 * M_PI * freq_hz / sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<float>(amplitude * std::sin(phase + step * static_cast<double>(i)));
    }
    return out;
}

std::vector<float> speech_like(std::size_t n, int sample_rate, std::uint64_t seed, float rms) {
    Rng rng(seed);
    std::vector<float> out(n, 0.0f);

    Biquad f1 = resonator(500.0, 6.0, sample_rate);
    Biquad f2 = resonator(1500.0, 8.0, sample_rate);
    Biquad f3 = resonator(2500.0, 8.0, sample_rate);

    const double base_pitch = 120.0;
    double next_pulse = 0.0;
    double pulse = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;

        pulse = 0.0;
        if (static_cast<double>(i) >= next_pulse) {
            pulse = 1.0;
            const double jitter = 1.0 + 0.04 * rng.uniform(-1.0, 1.0);
            const double vibrato = 1.0 + 0.03 * std::sin(2.0 * M_PI * 5.0 * t);
            next_pulse += sample_rate / (base_pitch * jitter * vibrato);
        }

        const double breath = 0.05 * rng.normal();
        const double excitation = pulse + breath;
        const double voiced = f1.tick(excitation) + 0.6 * f2.tick(excitation) +
                              0.4 * f3.tick(excitation) + 0.15 * excitation;

        // syllabic on/off at ~2.5 Hz with a soft floor
        const double env = 0.15 + 0.85 * std::pow(0.5 + 0.5 * std::sin(2.0 * M_PI * 2.5 * t), 2.0);
        out[i] = static_cast<float>(env * voiced);
    }
    rescale_rms(out, rms);
    return out;
}

} // namespace scald
