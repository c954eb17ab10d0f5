#include "scald/aecsim.hpp"

#include "scald/errors.hpp"
#include "scald/fft.hpp"
#include "scald/rng.hpp"
#include "scald/wav.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <cmath>
#include <limits>

namespace scald {

ImpulseResponse synth_room_ir(double rt60_ms, int length_taps, int sample_rate,
                              std::uint64_t seed, std::string label) {
    if (rt60_ms <= 0.0) throw ConfigError("synth_room_ir: rt60 must be positive");
    if (length_taps < 8) throw ConfigError("synth_room_ir: need at least 8 taps");

    Rng rng(seed);
    const int delay = 8 + rng.uniform_int(0, 32);
    const double rt60_samples = rt60_ms * 1e-3 * sample_rate;
    // amplitude decay so the energy envelope hits -60 dB at rt60
    const double decay = 3.0 * std::log(10.0) / rt60_samples;
    const double tail_sigma = 0.25;

    ImpulseResponse ir;
    ir.sample_rate = sample_rate;
    ir.label = std::move(label);
    ir.taps.assign(static_cast<std::size_t>(length_taps), 0.0f);
    if (delay < length_taps) ir.taps[static_cast<std::size_t>(delay)] = 2.0f * tail_sigma;
    for (int n = delay + 1; n < length_taps; ++n) {
        const double env = std::exp(-decay * static_cast<double>(n - delay));
        ir.taps[static_cast<std::size_t>(n)] = static_cast<float>(tail_sigma * env * rng.normal());
    }
    return ir;
}

AudioBuffer simulate_remote(std::span<const float> source, const ImpulseResponse& left,
                            const ImpulseResponse& right, int sample_rate) {
    if (left.taps.empty() || right.taps.empty()) {
        throw ConfigError("simulate_remote: both impulse responses must be present");
    }
    auto l = convolve(source, left.taps);
    auto r = convolve(source, right.taps);
    l.resize(source.size());
    r.resize(source.size());
    AudioBuffer out = make_stereo(sample_rate, std::move(l), std::move(r));
    return out;
}

void MdfConfig::validate() const {
    if (block_size < 8 || !is_power_of_two(static_cast<std::size_t>(block_size))) {
        throw ConfigError("mdf: block_size must be a power of two >= 8");
    }
    if (filter_length <= 0 || filter_length % block_size != 0) {
        throw ConfigError("mdf: filter_length must be a positive multiple of block_size");
    }
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw ConfigError("mdf: learning_rate must be in (0, 1]");
    }
    if (!(regularization > 0.0)) {
        throw ConfigError("mdf: regularization must be positive");
    }
}

StereoMdf::StereoMdf(const MdfConfig& cfg, int num_channels)
    : cfg_(cfg), num_channels_(num_channels) {
    cfg_.validate();
    if (num_channels < 1) throw ConfigError("mdf: need at least one far channel");
    num_partitions_ = cfg_.filter_length / cfg_.block_size;
    fft_size_ = 2 * cfg_.block_size;

    const auto c = static_cast<std::size_t>(num_channels_);
    const auto p = static_cast<std::size_t>(num_partitions_);
    const auto m = static_cast<std::size_t>(fft_size_);
    x_spec_.assign(c, std::vector<std::vector<std::complex<double>>>(
                          p, std::vector<std::complex<double>>(m, {0.0, 0.0})));
    weights_ = x_spec_;
    prev_block_.assign(c, std::vector<double>(static_cast<std::size_t>(cfg_.block_size), 0.0));
}

std::vector<float> StereoMdf::step(const std::vector<std::span<const float>>& far_blocks,
                                   std::span<const float> mic_block) {
    const int B = cfg_.block_size;
    const int M = fft_size_;
    if (static_cast<int>(far_blocks.size()) != num_channels_) {
        throw ConfigError("mdf: wrong number of far channels");
    }
    for (const auto& fb : far_blocks) {
        if (static_cast<int>(fb.size()) != B) throw ConfigError("mdf: far block size mismatch");
    }
    if (static_cast<int>(mic_block.size()) != B) throw ConfigError("mdf: mic block size mismatch");

    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(M));

    // shift the spectrum history and insert the new overlap-save block
    for (int c = 0; c < num_channels_; ++c) {
        auto& hist = x_spec_[static_cast<std::size_t>(c)];
        std::rotate(hist.rbegin(), hist.rbegin() + 1, hist.rend());
        auto& prev = prev_block_[static_cast<std::size_t>(c)];
        for (int i = 0; i < B; ++i) {
            scratch[static_cast<std::size_t>(i)] = {prev[static_cast<std::size_t>(i)], 0.0};
            scratch[static_cast<std::size_t>(B + i)] = {far_blocks[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)], 0.0};
            prev[static_cast<std::size_t>(i)] = far_blocks[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
        }
        fft(scratch);
        hist[0] = scratch;
    }

    // y = sum over channels and partitions of W * X, back to time, last half
    std::vector<std::complex<double>> y_spec(static_cast<std::size_t>(M), {0.0, 0.0});
    for (int c = 0; c < num_channels_; ++c) {
        for (int p = 0; p < num_partitions_; ++p) {
            const auto& x = x_spec_[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
            const auto& w = weights_[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
            for (int k = 0; k < M; ++k) {
                y_spec[static_cast<std::size_t>(k)] +=
                    x[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(k)];
            }
        }
    }
    scratch = y_spec;
    ifft(scratch);

    std::vector<float> error(static_cast<std::size_t>(B));
    std::vector<std::complex<double>> e_spec(static_cast<std::size_t>(M), {0.0, 0.0});
    for (int i = 0; i < B; ++i) {
        const double e = static_cast<double>(mic_block[static_cast<std::size_t>(i)]) -
                         scratch[static_cast<std::size_t>(B + i)].real();
        error[static_cast<std::size_t>(i)] = static_cast<float>(e);
        e_spec[static_cast<std::size_t>(B + i)] = {e, 0.0};
    }
    fft(e_spec);

    // per-bin input power over the whole filter span, all channels
    std::vector<double> power(static_cast<std::size_t>(M), 0.0);
    double power_mean = 0.0;
    for (int c = 0; c < num_channels_; ++c) {
        for (int p = 0; p < num_partitions_; ++p) {
            const auto& x = x_spec_[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
            for (int k = 0; k < M; ++k) {
                power[static_cast<std::size_t>(k)] += std::norm(x[static_cast<std::size_t>(k)]);
            }
        }
    }
    for (int k = 0; k < M; ++k) power_mean += power[static_cast<std::size_t>(k)];
    power_mean /= static_cast<double>(M);
    const double floor = cfg_.regularization * power_mean + 1e-300;

    // constrained update: gradient step per partition, zero the wrapped half
    const double mu = cfg_.learning_rate;
    for (int c = 0; c < num_channels_; ++c) {
        for (int p = 0; p < num_partitions_; ++p) {
            const auto& x = x_spec_[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
            auto& w = weights_[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
            for (int k = 0; k < M; ++k) {
                const double denom = power[static_cast<std::size_t>(k)] + floor;
                w[static_cast<std::size_t>(k)] += mu *
                    std::conj(x[static_cast<std::size_t>(k)]) * e_spec[static_cast<std::size_t>(k)] /
                    denom;
            }
            scratch = w;
            ifft(scratch);
            for (int i = B; i < M; ++i) scratch[static_cast<std::size_t>(i)] = {0.0, 0.0};
            fft(scratch);
            w = scratch;
        }
    }
    return error;
}

std::vector<double> StereoMdf::estimated_taps(int channel) const {
    const int B = cfg_.block_size;
    const int M = fft_size_;
    std::vector<double> taps(static_cast<std::size_t>(cfg_.filter_length), 0.0);
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(M));
    for (int p = 0; p < num_partitions_; ++p) {
        scratch = weights_[static_cast<std::size_t>(channel)][static_cast<std::size_t>(p)];
        ifft(scratch);
        for (int i = 0; i < B; ++i) {
            taps[static_cast<std::size_t>(p * B + i)] = scratch[static_cast<std::size_t>(i)].real();
        }
    }
    return taps;
}

std::vector<float> render_near_mic(const AudioBuffer& far, const NearEndSetup& near) {
    const int channels = far.num_channels();
    if (channels < 1) throw ConfigError("render_near_mic: no far channels");
    if (static_cast<int>(near.speaker_to_mic.size()) != channels) {
        throw ConfigError("render_near_mic: need one near response per far channel");
    }
    const std::size_t n = far.num_frames();

    std::vector<double> mic(n, 0.0);
    for (int c = 0; c < channels; ++c) {
        auto echo = convolve(far.channel(c), near.speaker_to_mic[static_cast<std::size_t>(c)].taps);
        for (std::size_t i = 0; i < n; ++i) mic[i] += echo[i];
    }
    double signal_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) signal_power += mic[i] * mic[i];
    signal_power /= static_cast<double>(n);

    if (std::isfinite(near.snr_db) && signal_power > 0.0) {
        Rng rng(near.noise_seed);
        std::vector<double> noise(n);
        double noise_power = 0.0;
        for (auto& v : noise) {
            v = rng.normal();
            noise_power += v * v;
        }
        noise_power /= static_cast<double>(n);
        const double target = signal_power / std::pow(10.0, near.snr_db / 10.0);
        const double scale = std::sqrt(target / noise_power);
        for (std::size_t i = 0; i < n; ++i) mic[i] += scale * noise[i];
    }

    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(mic[i]);
    return out;
}

MisalignmentTrace cancel_stream(const AudioBuffer& far, std::span<const float> mic,
                                std::span<const double> h_true, const MdfConfig& aec,
                                double interval_s) {
    aec.validate();
    const int channels = far.num_channels();
    if (channels < 1) throw ConfigError("cancel_stream: no far channels");
    if (mic.size() != far.num_frames()) throw ConfigError("cancel_stream: mic length mismatch");
    if (h_true.size() != static_cast<std::size_t>(channels) *
                             static_cast<std::size_t>(aec.filter_length)) {
        throw ConfigError("cancel_stream: h_true must hold filter_length taps per channel");
    }
    if (!(interval_s > 0.0)) throw ConfigError("cancel_stream: bad interval");

    StereoMdf mdf(aec, channels);
    const int B = aec.block_size;
    const std::size_t n_blocks = far.num_frames() / static_cast<std::size_t>(B);
    const auto interval_samples =
        static_cast<std::size_t>(interval_s * static_cast<double>(far.sample_rate));

    MisalignmentTrace trace;
    trace.filter_length = aec.filter_length;
    double min_eta = std::numeric_limits<double>::infinity();
    std::size_t next_sample_point = interval_samples;

    std::vector<std::span<const float>> far_blocks(static_cast<std::size_t>(channels));

    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t start = b * static_cast<std::size_t>(B);
        for (int c = 0; c < channels; ++c) {
            far_blocks[static_cast<std::size_t>(c)] =
                far.channel(c).subspan(start, static_cast<std::size_t>(B));
        }
        mdf.step(far_blocks, mic.subspan(start, static_cast<std::size_t>(B)));

        const std::size_t processed = start + static_cast<std::size_t>(B);
        if (processed >= next_sample_point || b + 1 == n_blocks) {
            next_sample_point += interval_samples;
            std::vector<double> h_est;
            h_est.reserve(h_true.size());
            for (int c = 0; c < channels; ++c) {
                const auto taps = mdf.estimated_taps(c);
                h_est.insert(h_est.end(), taps.begin(), taps.end());
            }
            const double eta = misalignment_db(h_true, h_est);
            trace.time_s.push_back(static_cast<double>(processed) / far.sample_rate);
            trace.eta_db.push_back(eta);
            min_eta = std::min(min_eta, eta);
            if (eta > min_eta + 20.0) {
                throw NumericError("adaptive filter diverged: misalignment " +
                                   std::to_string(eta) + " dB is more than 20 dB above the " +
                                   std::to_string(min_eta) + " dB minimum");
            }
        }
    }
    return trace;
}

MisalignmentTrace simulate_near_and_cancel(const AudioBuffer& far, const NearEndSetup& near,
                                           const MdfConfig& aec, double interval_s) {
    aec.validate();
    const auto mic = render_near_mic(far, near);

    const int channels = far.num_channels();
    std::vector<double> h_true(static_cast<std::size_t>(channels) *
                               static_cast<std::size_t>(aec.filter_length));
    for (int c = 0; c < channels; ++c) {
        const auto& taps = near.speaker_to_mic[static_cast<std::size_t>(c)].taps;
        for (int i = 0; i < aec.filter_length; ++i) {
            h_true[static_cast<std::size_t>(c * aec.filter_length + i)] =
                i < static_cast<int>(taps.size()) ? taps[static_cast<std::size_t>(i)] : 0.0;
        }
    }
    return cancel_stream(far, mic, h_true, aec, interval_s);
}

void EchoSimConfig::validate() const {
    if (sample_rate < 8000 || sample_rate > 48000) {
        throw ConfigError("echo sim: sample rate out of the 8000-48000 Hz range");
    }
    if (!(duration_s > 0.0)) throw ConfigError("echo sim: duration must be positive");
    if (!std::isfinite(snr_db)) throw ConfigError("echo sim: snr_db must be finite");
    if (remote_ir_length < 8 || near_ir_length < 8) {
        throw ConfigError("echo sim: impulse responses need at least 8 taps");
    }
    if (!(remote_rt60_ms > 0.0) || !(near_rt60_ms > 0.0)) {
        throw ConfigError("echo sim: rt60 must be positive");
    }
    if (!(misalignment_interval_s > 0.0)) {
        throw ConfigError("echo sim: misalignment interval must be positive");
    }
    aec.validate();
}

ComparisonReport run_comparison(const EchoSimConfig& cfg,
                                const std::vector<SimAlgorithm>& algorithms,
                                const std::vector<SimMaterial>& materials) {
    cfg.validate();
    if (algorithms.empty()) throw ConfigError("run_comparison: no algorithms");
    if (materials.empty()) throw ConfigError("run_comparison: no materials");

    ComparisonReport report;
    report.config = cfg;

    const auto remote_l = synth_room_ir(cfg.remote_rt60_ms, cfg.remote_ir_length,
                                        cfg.sample_rate, child_seed(cfg.seed, 1), "remote_micL");
    const auto remote_r = synth_room_ir(cfg.remote_rt60_ms, cfg.remote_ir_length,
                                        cfg.sample_rate, child_seed(cfg.seed, 2), "remote_micR");
    const auto near_l = synth_room_ir(cfg.near_rt60_ms, cfg.near_ir_length, cfg.sample_rate,
                                      child_seed(cfg.seed, 3), "near_mic_from_spkL");
    const auto near_r = synth_room_ir(cfg.near_rt60_ms, cfg.near_ir_length, cfg.sample_rate,
                                      child_seed(cfg.seed, 4), "near_mic_from_spkR");

    const auto n = static_cast<std::size_t>(cfg.duration_s * cfg.sample_rate);

    for (const auto& material : materials) {
        std::vector<float> source = material.samples;
        if (source.size() > n) source.resize(n);
        if (source.empty()) throw ConfigError("run_comparison: empty material " + material.name);

        AudioBuffer far;
        if (cfg.mono) {
            auto m = convolve(source, remote_l.taps);
            m.resize(source.size());
            far = make_mono(cfg.sample_rate, std::move(m));
        } else {
            far = simulate_remote(source, remote_l, remote_r, cfg.sample_rate);
        }

        for (const auto& algo : algorithms) {
            const auto t0 = std::chrono::steady_clock::now();

            AudioBuffer processed = apply_decorrelator(algo.decorrelator, far);

            RunResult run;
            run.algorithm = algo.name;
            run.material = material.name;

            if (!cfg.mono) {
                const int fft_size = 1024;
                const auto hop = static_cast<std::size_t>(fft_size) / 2;
                const int blocks =
                    static_cast<int>(processed.num_frames() / hop) - 1;
                const auto spec = coherence(processed.channel(0), processed.channel(1), fft_size,
                                            std::max(blocks, 2), cfg.sample_rate);
                const double hi = std::min(20000.0, 0.5 * cfg.sample_rate);
                run.band_coherence = band_average(spec, 2000.0, hi);
            }

            NearEndSetup near;
            near.snr_db = cfg.snr_db;
            near.noise_seed = child_seed(cfg.seed, 5);
            near.speaker_to_mic.push_back(near_l);
            if (!cfg.mono) near.speaker_to_mic.push_back(near_r);

            const auto mic = render_near_mic(processed, near);
            std::vector<double> h_true(near.speaker_to_mic.size() *
                                       static_cast<std::size_t>(cfg.aec.filter_length));
            for (std::size_t c = 0; c < near.speaker_to_mic.size(); ++c) {
                const auto& taps = near.speaker_to_mic[c].taps;
                for (int i = 0; i < cfg.aec.filter_length; ++i) {
                    h_true[c * static_cast<std::size_t>(cfg.aec.filter_length) +
                           static_cast<std::size_t>(i)] =
                        i < static_cast<int>(taps.size()) ? taps[static_cast<std::size_t>(i)] : 0.0;
                }
            }

            if (!cfg.debug_dump_dir.empty()) {
                const std::filesystem::path dir(cfg.debug_dump_dir);
                std::filesystem::create_directories(dir);
                const std::string stem = algo.name + "_" + material.name;
                write_wav(dir / (stem + "_far.wav"), processed, WavFormat::float32);
                write_wav(dir / (stem + "_mic.wav"),
                          make_mono(cfg.sample_rate, mic), WavFormat::float32);
            }

            run.trace = cancel_stream(processed, mic, h_true, cfg.aec,
                                      cfg.misalignment_interval_s);
            run.final_misalignment_db = run.trace.final_db();
            run.runtime_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            report.runs.push_back(std::move(run));
        }
    }
    return report;
}

} // namespace scald
