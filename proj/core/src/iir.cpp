#include "scald/iir.hpp"

#include "scald/errors.hpp"

#include <cmath>
#include <ostream>

namespace scald {

std::vector<double> filter_zero_state(const RationalFilter& f, std::span<const double> x) {
    if (f.a.empty() || f.a[0] == 0.0) {
        throw ConfigError("filter denominator must have a nonzero leading coefficient");
    }
    const double a0 = f.a[0];
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.b.size() && k <= n; ++k) {
            acc += f.b[k] * x[n - k];
        }
        for (std::size_t k = 1; k < f.a.size() && k <= n; ++k) {
            acc -= f.a[k] * y[n - k];
        }
        y[n] = acc / a0;
    }
    return y;
}

std::vector<double> impulse_response(const RationalFilter& f, std::size_t n) {
    std::vector<double> delta(n, 0.0);
    if (n > 0) delta[0] = 1.0;
    return filter_zero_state(f, delta);
}

std::complex<double> evaluate_at(const RationalFilter& f, double omega) {
    const std::complex<double> zinv = std::polar(1.0, -omega);
    // Horner on ascending powers of z^-1, evaluated highest power first
    std::complex<double> num = 0.0;
    for (std::size_t k = f.b.size(); k-- > 0;) num = num * zinv + f.b[k];
    std::complex<double> den = 0.0;
    for (std::size_t k = f.a.size(); k-- > 0;) den = den * zinv + f.a[k];
    return num / den;
}

FrequencyResponse frequency_response(const RationalFilter& f, int n_bins) {
    if (n_bins < 1) throw ConfigError("frequency_response needs at least one bin");
    FrequencyResponse r;
    r.omega.reserve(static_cast<std::size_t>(n_bins));
    r.magnitude.reserve(static_cast<std::size_t>(n_bins));
    r.phase.reserve(static_cast<std::size_t>(n_bins));
    for (int k = 0; k < n_bins; ++k) {
        const double w = M_PI * static_cast<double>(k) / static_cast<double>(n_bins);
        const std::complex<double> h = evaluate_at(f, w);
        r.omega.push_back(w);
        r.magnitude.push_back(std::abs(h));
        r.phase.push_back(std::arg(h));
    }
    return r;
}

void write_frequency_response_csv(std::ostream& os, const FrequencyResponse& r) {
    os << "omega,magnitude,phase\n";
    for (std::size_t i = 0; i < r.omega.size(); ++i) {
        os << r.omega[i] << ',' << r.magnitude[i] << ',' << r.phase[i] << '\n';
    }
}

RationalFilter general_allpass(std::span<const double> a_coeffs, AllpassForm form) {
    const std::size_t order = a_coeffs.size();
    if (order == 0) throw ConfigError("general_allpass needs order >= 1");

    RationalFilter f;
    f.a.assign(order + 1, 0.0);
    f.a[0] = 1.0;
    for (std::size_t k = 1; k <= order; ++k) f.a[k] = -a_coeffs[k - 1];

    f.b.assign(order + 1, 0.0);
    if (form == AllpassForm::literal) {
        // numerator as printed: sum_k a_k z^{k-N} + z^-N
        for (std::size_t k = 1; k <= order; ++k) f.b[order - k] = a_coeffs[k - 1];
        f.b[order] += 1.0;
    } else {
        for (std::size_t k = 0; k <= order; ++k) f.b[k] = f.a[order - k];
    }
    return f;
}

} // namespace scald
