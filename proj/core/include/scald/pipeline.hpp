#pragma once

#include "scald/audio.hpp"
#include "scald/decorrelators.hpp"
#include "scald/psynoise.hpp"

#include <cstdint>
#include <string>

namespace scald {

enum class Method { none, scal, comb, allpass, smoothed_abs, noise };

std::string method_name(Method m);
Method method_from_name(const std::string& name); // ConfigError on unknown names

// Full per-file processing selection. Each channel runs an independent
// instance; channel seeds are derived from the master seed with the fixed
// fan-out child_seed(master, channel) for the filter stage and
// child_seed(master, 16 + channel) for the noise stage.
struct DecorrelatorConfig {
    Method method = Method::none;
    bool with_noise = false; // masked-noise injection after the filter stage
    std::uint64_t seed = 1;

    ScalConfig scal{};
    int comb_order = 7;
    AllpassBaselineConfig allpass{};
    SmoothedAbsConfig smoothed{};
    NoiseInjectorConfig noise{};

    void validate(int sample_rate) const;
};

AudioBuffer apply_decorrelator(const DecorrelatorConfig& cfg, const AudioBuffer& input);

} // namespace scald
