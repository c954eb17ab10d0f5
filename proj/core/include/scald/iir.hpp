#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

namespace scald {

// Rational transfer function B(z)/A(z) with coefficients in ascending powers
// of z^-1. a[0] need not be 1; evaluation and filtering normalize by it.
struct RationalFilter {
    std::vector<double> b;
    std::vector<double> a;
};

// Direct-form filtering with zero initial state.
std::vector<double> filter_zero_state(const RationalFilter& f, std::span<const double> x);

// Impulse response, first n samples.
std::vector<double> impulse_response(const RationalFilter& f, std::size_t n);

// Transfer function value at z = e^{j omega}.
std::complex<double> evaluate_at(const RationalFilter& f, double omega);

struct FrequencyResponse {
    std::vector<double> omega;     // [0, pi), n_bins points
    std::vector<double> magnitude;
    std::vector<double> phase;     // radians, principal value
};

FrequencyResponse frequency_response(const RationalFilter& f, int n_bins);

// CSV rows "omega,magnitude,phase" (one header line).
void write_frequency_response_csv(std::ostream& os, const FrequencyResponse& r);

// Coefficient conventions for the comb-allpass family. The printed recursion
// keeps the numerator as published; the flat variant time-reverses the
// denominator into the numerator, which pins |A(e^{jw})| to exactly 1.
enum class AllpassForm { literal, flat };

// General order-N allpass from denominator coefficients a_1..a_N:
// A(z) = (sum_k a_k z^{k-N} + z^-N) / (1 - sum_k a_k z^-k).
RationalFilter general_allpass(std::span<const double> a_coeffs, AllpassForm form);

} // namespace scald
