#include "scald/decorrelators.hpp"

#include "scald/errors.hpp"
#include "scald/wola.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scald {

double ScalConfig::alpha_bound() const { return (1.0 - epsilon) / (1.0 + std::abs(beta)); }

void ScalConfig::validate() const {
    if (!(std::abs(beta) < 1.0)) {
        throw ConfigError("scal: |beta| must be < 1, got " + std::to_string(beta));
    }
    if (n_min < 1 || n_max < n_min) {
        throw ConfigError("scal: need 1 <= n_min <= n_max, got [" + std::to_string(n_min) +
                          ", " + std::to_string(n_max) + "]");
    }
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("scal: epsilon must be in (0, 0.5), got " + std::to_string(epsilon));
    }
    if (r_max < 0.0) {
        throw ConfigError("scal: r_max must be >= 0, got " + std::to_string(r_max));
    }
    if (n_max >= window.length) {
        throw ConfigError("scal: filter order must stay below the window length");
    }
    make_window(window); // validates the window spec
}

bool check_stability(double alpha, double beta) {
    return std::abs(alpha) * (1.0 + std::abs(beta)) < 1.0;
}

double alpha_step(double alpha_prev, double r0, double beta, double epsilon) {
    const double bound = (1.0 - epsilon) / (1.0 + std::abs(beta));
    return std::clamp(alpha_prev + r0, -bound, bound);
}

double update_alpha(ScalFrameState& state, const ScalConfig& cfg) {
    const double r0 = state.rng.uniform(-cfg.r_max, cfg.r_max);
    state.alpha = alpha_step(state.alpha, r0, cfg.beta, cfg.epsilon);
    return state.alpha;
}

int update_order(ScalFrameState& state, const ScalConfig& cfg) {
    state.order = state.rng.uniform_int(cfg.n_min, cfg.n_max);
    return state.order;
}

RationalFilter scal_coefficients(double alpha, double beta, int order, AllpassForm form) {
    if (order < 1) throw ConfigError("scal filter order must be >= 1");
    const auto n = static_cast<std::size_t>(order);

    RationalFilter f;
    f.a.assign(n + 1, 0.0);
    f.a[0] = 1.0;
    f.a[n - 1] += alpha * beta;
    f.a[n] += -alpha;

    f.b.assign(n + 1, 0.0);
    if (form == AllpassForm::literal) {
        f.b[0] += alpha;
        f.b[1] += -alpha * beta; // shares the z^-N slot when N == 1
        f.b[n] += 1.0;
    } else {
        for (std::size_t k = 0; k <= n; ++k) f.b[k] = f.a[n - k];
    }
    return f;
}

std::vector<double> scal_frame_filter(std::span<const double> frame, double alpha, double beta,
                                      int order, AllpassForm form) {
    if (!check_stability(alpha, beta)) {
        throw ConfigError("scal: |alpha|(1+|beta|) >= 1 rejected (alpha=" +
                          std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
    }
    if (order >= static_cast<int>(frame.size())) {
        throw ConfigError("scal: order must be below the frame length");
    }
    return filter_zero_state(scal_coefficients(alpha, beta, order, form), frame);
}

std::vector<float> scal_process(const ScalConfig& cfg, std::span<const float> input) {
    cfg.validate();
    ScalFrameState state(cfg.seed);
    const FrameTransform transform = [&](const std::vector<double>& frame) {
        update_order(state, cfg);
        update_alpha(state, cfg);
        if (state.alpha == 0.0) return frame; // zero depth leaves the frame untouched
        return scal_frame_filter(frame, state.alpha, cfg.beta, state.order, cfg.form);
    };

    // pad to a whole number of hops; the frames are causal, so trimming the
    // tail afterwards recovers the exact unpadded result
    const auto hop = static_cast<std::size_t>(cfg.window.hop());
    const std::size_t rem = input.size() % hop;
    if (rem == 0) {
        return wola_process(cfg.window, input, transform);
    }
    std::vector<float> padded(input.begin(), input.end());
    padded.resize(input.size() + (hop - rem), 0.0f);
    auto out = wola_process(cfg.window, padded, transform);
    out.resize(input.size());
    return out;
}

ScalConfig comb_allpass_config(int order, const ScalConfig& base) {
    ScalConfig cfg = base;
    cfg.beta = 0.0;
    cfg.n_min = order;
    cfg.n_max = order;
    return cfg;
}

std::vector<float> comb_allpass_process(const ScalConfig& base, int order,
                                        std::span<const float> input) {
    return scal_process(comb_allpass_config(order, base), input);
}

void AllpassBaselineConfig::validate() const {
    if (!(alpha_min > -1.0 && alpha_min < 0.0)) {
        throw ConfigError("allpass baseline: alpha_min must be in (-1, 0), got " +
                          std::to_string(alpha_min));
    }
    if (!(walk_step > 0.0)) {
        throw ConfigError("allpass baseline: walk_step must be positive");
    }
}

std::vector<float> first_order_allpass_process(const AllpassBaselineConfig& cfg,
                                               std::span<const float> input) {
    cfg.validate();
    Rng rng(cfg.seed);
    double a = 0.5 * cfg.alpha_min;
    double x1 = 0.0;
    double y1 = 0.0;
    std::vector<float> out(input.size());
    for (std::size_t n = 0; n < input.size(); ++n) {
        a += rng.uniform(-cfg.walk_step, cfg.walk_step);
        if (a > 0.0) a = -a;
        if (a < cfg.alpha_min) a = 2.0 * cfg.alpha_min - a;
        const double x = input[n];
        const double y = a * x + x1 - a * y1;
        out[n] = static_cast<float>(y);
        x1 = x;
        y1 = y;
    }
    return out;
}

void SmoothedAbsConfig::validate() const {
    if (!(alpha_abs >= 0.0 && alpha_abs < 1.0)) {
        throw ConfigError("smoothed_abs: alpha_abs must be in [0, 1), got " +
                          std::to_string(alpha_abs));
    }
    if (channel_sign != 1 && channel_sign != -1) {
        throw ConfigError("smoothed_abs: channel_sign must be +1 or -1");
    }
    if (!(smoothing_delta > 0.0)) {
        throw ConfigError("smoothed_abs: smoothing_delta must be positive");
    }
}

std::vector<float> smoothed_abs_process(const SmoothedAbsConfig& cfg,
                                        std::span<const float> input) {
    cfg.validate();
    const double gain = cfg.channel_sign * cfg.alpha_abs;
    const double d = cfg.smoothing_delta;
    std::vector<float> out(input.size());
    for (std::size_t n = 0; n < input.size(); ++n) {
        const double x = input[n];
        out[n] = static_cast<float>(x + gain * (std::sqrt(x * x + d * d) - d));
    }
    return out;
}

} // namespace scald
