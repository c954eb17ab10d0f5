#include "scald/pipeline.hpp"

#include "scald/errors.hpp"

namespace scald {

std::string method_name(Method m) {
    switch (m) {
    case Method::none: return "none";
    case Method::scal: return "scal";
    case Method::comb: return "comb";
    case Method::allpass: return "allpass";
    case Method::smoothed_abs: return "smoothed_abs";
    case Method::noise: return "noise";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "none") return Method::none;
    if (name == "scal") return Method::scal;
    if (name == "comb") return Method::comb;
    if (name == "allpass") return Method::allpass;
    if (name == "smoothed_abs") return Method::smoothed_abs;
    if (name == "noise") return Method::noise;
    throw ConfigError("unknown method '" + name +
                      "' (expected none|scal|comb|allpass|smoothed_abs|noise)");
}

void DecorrelatorConfig::validate(int sample_rate) const {
    if (sample_rate <= 0) throw ConfigError("decorrelator: sample rate must be positive");
    switch (method) {
    case Method::scal: scal.validate(); break;
    case Method::comb:
        comb_allpass_config(comb_order, scal).validate();
        break;
    case Method::allpass: allpass.validate(); break;
    case Method::smoothed_abs: smoothed.validate(); break;
    case Method::noise:
    case Method::none: break;
    }
    if (with_noise || method == Method::noise) noise.validate();
}

AudioBuffer apply_decorrelator(const DecorrelatorConfig& cfg, const AudioBuffer& input) {
    cfg.validate(input.sample_rate);

    AudioBuffer out = input;
    for (int c = 0; c < input.num_channels(); ++c) {
        const std::uint64_t filter_seed = child_seed(cfg.seed, static_cast<std::uint64_t>(c));
        std::span<const float> x = input.channel(c);

        std::vector<float> y;
        switch (cfg.method) {
        case Method::none:
        case Method::noise:
            y.assign(x.begin(), x.end());
            break;
        case Method::scal: {
            ScalConfig sc = cfg.scal;
            sc.seed = filter_seed;
            y = scal_process(sc, x);
            break;
        }
        case Method::comb: {
            ScalConfig sc = cfg.scal;
            sc.seed = filter_seed;
            y = comb_allpass_process(sc, cfg.comb_order, x);
            break;
        }
        case Method::allpass: {
            AllpassBaselineConfig ac = cfg.allpass;
            ac.seed = filter_seed;
            y = first_order_allpass_process(ac, x);
            break;
        }
        case Method::smoothed_abs: {
            SmoothedAbsConfig sc = cfg.smoothed;
            sc.channel_sign = (c % 2 == 0) ? +1 : -1;
            y = smoothed_abs_process(sc, x);
            break;
        }
        }

        if (cfg.with_noise || cfg.method == Method::noise) {
            NoiseInjectorConfig nc = cfg.noise;
            nc.seed = child_seed(cfg.seed, 16 + static_cast<std::uint64_t>(c));
            y = inject_noise(nc, y, input.sample_rate);
        }
        out.channels[static_cast<std::size_t>(c)] = std::move(y);
    }
    return out;
}

} // namespace scald
