#include "scald/window.hpp"

#include "scald/errors.hpp"

#include <cmath>
#include <string>

namespace scald {

std::vector<double> make_window(const WindowSpec& spec) {
    if (spec.length < 4 || spec.length % 2 != 0) {
        throw ConfigError("window length must be even and >= 4, got " +
                          std::to_string(spec.length));
    }
    const int n = spec.length;
    std::vector<double> w(static_cast<std::size_t>(n));
    constexpr double half_pi = 1.5707963267948966192313216916398;
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(M_PI * (i + 0.5) / n);
        w[static_cast<std::size_t>(i)] = std::sin(half_pi * s * s);
    }
    return w;
}

} // namespace scald
