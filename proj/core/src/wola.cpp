#include "scald/wola.hpp"

#include "scald/errors.hpp"

#include <string>

namespace scald {

std::vector<float> wola_process(const WindowSpec& spec, std::span<const float> input,
                                const FrameTransform& transform) {
    const std::vector<double> window = make_window(spec);
    const int L = spec.length;
    const int hop = spec.hop();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());

    if (n % hop != 0) {
        throw ConfigError("wola input length " + std::to_string(n) +
                          " is not a multiple of the hop " + std::to_string(hop));
    }

    std::vector<double> acc(input.size(), 0.0);
    std::vector<double> frame(static_cast<std::size_t>(L));

    for (std::ptrdiff_t start = -hop; start <= n - hop; start += hop) {
        for (int j = 0; j < L; ++j) {
            const std::ptrdiff_t pos = start + j;
            const double x = (pos >= 0 && pos < n) ? input[static_cast<std::size_t>(pos)] : 0.0;
            frame[static_cast<std::size_t>(j)] = window[static_cast<std::size_t>(j)] * x;
        }

        std::vector<double> out = transform(frame);
        if (out.size() != static_cast<std::size_t>(L)) {
            throw ContractError("frame transform returned " + std::to_string(out.size()) +
                                " samples for a " + std::to_string(L) + "-sample frame");
        }

        for (int j = 0; j < L; ++j) {
            const std::ptrdiff_t pos = start + j;
            if (pos >= 0 && pos < n) {
                acc[static_cast<std::size_t>(pos)] +=
                    window[static_cast<std::size_t>(j)] * out[static_cast<std::size_t>(j)];
            }
        }
    }

    std::vector<float> result(input.size());
    for (std::size_t i = 0; i < result.size(); ++i) result[i] = static_cast<float>(acc[i]);
    return result;
}

std::vector<float> wola_identity(const WindowSpec& spec, std::span<const float> input) {
    return wola_process(spec, input, [](const std::vector<double>& f) { return f; });
}

} // namespace scald
