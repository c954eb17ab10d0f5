#pragma once

#include "scald/iir.hpp"
#include "scald/rng.hpp"
#include "scald/window.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace scald {

// Shaped comb-allpass decorrelator parameters.
//
// The filter A(z) = [alpha (1 - beta z^-1) + z^-N] / [1 - alpha (-beta z^{-N+1} + z^-N)]
// perturbs phase with depth alpha and tilt beta; N trades comb density against
// the spacing of the phase-response nulls. Both alpha and N are re-randomized
// per window so the nulls move over time.
struct ScalConfig {
    double beta = 0.43;
    int n_min = 5;
    int n_max = 10;
    double r_max = 0.6;      // per-window alpha step is uniform in [-r_max, r_max]
    double epsilon = 0.01;   // pole margin to the unit circle
    std::uint64_t seed = 1;
    WindowSpec window{};
    AllpassForm form = AllpassForm::flat;

    // (1 - eps) / (1 + |beta|): the largest |alpha| the stability bound allows.
    double alpha_bound() const;

    void validate() const; // throws ConfigError
};

// Sufficient stability condition |alpha| (1 + |beta|) < 1, strict.
bool check_stability(double alpha, double beta);

// One alpha recursion step: min(alpha_prev + r0, bound), mirrored at -bound.
double alpha_step(double alpha_prev, double r0, double beta, double epsilon);

// Per-stream random state for the SCAL recursion.
struct ScalFrameState {
    double alpha = 0.0;
    int order = 0;
    Rng rng;

    explicit ScalFrameState(std::uint64_t seed = 1) : rng(seed) {}
};

// Draws r0 and advances alpha; the result always satisfies check_stability.
double update_alpha(ScalFrameState& state, const ScalConfig& cfg);

// Uniform integer draw in [n_min, n_max].
int update_order(ScalFrameState& state, const ScalConfig& cfg);

// Coefficients of one frozen-parameter SCAL filter.
RationalFilter scal_coefficients(double alpha, double beta, int order, AllpassForm form);

// Filters one frame with zero initial state; rejects unstable parameters.
std::vector<double> scal_frame_filter(std::span<const double> frame, double alpha, double beta,
                                      int order, AllpassForm form);

// Full per-channel SCAL chain: WOLA hosting the frame filter with per-window
// alpha/order updates. Deterministic for a fixed seed.
std::vector<float> scal_process(const ScalConfig& cfg, std::span<const float> input);

// Plain comb-allpass baseline: SCAL with beta = 0 and a fixed order.
ScalConfig comb_allpass_config(int order = 7, const ScalConfig& base = {});
std::vector<float> comb_allpass_process(const ScalConfig& base, int order,
                                        std::span<const float> input);

// First-order time-varying allpass baseline:
// y(n) = a(n) x(n) + x(n-1) - a(n) y(n-1), a(n) a reflected per-sample random
// walk in [alpha_min, 0].
struct AllpassBaselineConfig {
    double alpha_min = -0.985;
    double walk_step = 0.01;
    std::uint64_t seed = 1;

    void validate() const;
};

std::vector<float> first_order_allpass_process(const AllpassBaselineConfig& cfg,
                                               std::span<const float> input);

// Smoothed-absolute-value nonlinearity:
// y = x + sign * alpha_abs * (sqrt(x^2 + delta^2) - delta).
// Opposite channel signs keep the stereo pair from receiving the same
// transform.
struct SmoothedAbsConfig {
    double alpha_abs = 0.3;
    int channel_sign = +1;
    double smoothing_delta = 1e-3;

    void validate() const;
};

std::vector<float> smoothed_abs_process(const SmoothedAbsConfig& cfg,
                                        std::span<const float> input);

} // namespace scald
