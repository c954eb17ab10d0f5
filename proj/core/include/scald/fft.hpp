#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace scald {

constexpr bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 transforms; size must be a power of two.
void fft(std::span<std::complex<double>> data);
void ifft(std::span<std::complex<double>> data); // includes the 1/N scaling

// DFT of a real signal, bins 0 .. n/2 inclusive.
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft; n is the even output length, half.size() must be n/2 + 1.
std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n);

// Linear convolution, FFT-backed. Output length is x.size() + h.size() - 1.
std::vector<float> convolve(std::span<const float> x, std::span<const float> h);

} // namespace scald
