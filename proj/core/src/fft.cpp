#include "scald/fft.hpp"

#include "scald/errors.hpp"

#include <cmath>

namespace scald {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void transform(std::span<std::complex<double>> a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) {
        throw ConfigError("fft size must be a power of two, got " + std::to_string(n));
    }
    if (n == 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // one twiddle table for the largest stage, strided for the smaller ones
    static thread_local std::vector<std::complex<double>> twiddle;
    static thread_local std::size_t twiddle_n = 0;
    if (twiddle_n != n) {
        twiddle.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
            twiddle[k] = {std::cos(ang), std::sin(ang)};
        }
        twiddle_n = n;
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = twiddle[k * stride];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= scale;
    }
}

} // namespace

void fft(std::span<std::complex<double>> data) { transform(data, false); }

void ifft(std::span<std::complex<double>> data) { transform(data, true); }

std::vector<std::complex<double>> rfft(std::span<const double> x) {
    std::vector<std::complex<double>> buf(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = {x[i], 0.0};
    fft(buf);
    buf.resize(x.size() / 2 + 1);
    return buf;
}

std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n) {
    if (half.size() != n / 2 + 1 || n % 2 != 0) {
        throw ConfigError("irfft: inconsistent spectrum size");
    }
    std::vector<std::complex<double>> buf(n);
    for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = half[k];
    for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(half[n - k]);
    ifft(buf);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
    return out;
}

std::vector<float> convolve(std::span<const float> x, std::span<const float> h) {
    if (x.empty() || h.empty()) return {};
    const std::size_t out_len = x.size() + h.size() - 1;
    std::size_t n = 1;
    while (n < out_len) n <<= 1;

    std::vector<std::complex<double>> a(n), b(n);
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = {static_cast<double>(x[i]), 0.0};
    for (std::size_t i = 0; i < h.size(); ++i) b[i] = {static_cast<double>(h[i]), 0.0};
    fft(a);
    fft(b);
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
    ifft(a);

    std::vector<float> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = static_cast<float>(a[i].real());
    return out;
}

} // namespace scald
