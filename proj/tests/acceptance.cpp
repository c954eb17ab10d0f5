// Acceptance suite: one criterion per run block, each printing a PASS/FAIL
// line. Run with no arguments for all criteria or with a number for one.

#include "scald/aecsim.hpp"
#include "scald/analysis.hpp"
#include "scald/decorrelators.hpp"
#include "scald/errors.hpp"
#include "scald/fft.hpp"
#include "scald/pipeline.hpp"
#include "scald/psynoise.hpp"
#include "scald/signals.hpp"
#include "scald/wav.hpp"
#include "scald/wola.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace scald;

namespace {

using Failures = std::vector<std::string>;

std::string fmt(const char* pattern, double value) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, value);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. flat-mode magnitude response is unity for stable random parameters

Failures criterion_flatness() {
    Failures fails;
    const auto t0 = std::chrono::steady_clock::now();

    Rng rng(20240801);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double beta = rng.uniform(-0.9, 0.9);
        const double bound = (1.0 - 0.01) / (1.0 + std::abs(beta));
        const double alpha = rng.uniform(-bound, bound);
        const int order = rng.uniform_int(1, 16);
        const auto f = scal_coefficients(alpha, beta, order, AllpassForm::flat);
        for (int k = 0; k < 4096; ++k) {
            const double w = M_PI * static_cast<double>(k) / 4096.0;
            worst = std::max(worst, std::abs(std::abs(evaluate_at(f, w)) - 1.0));
        }
    }
    if (worst >= 1e-9) fails.push_back(fmt("worst |mag - 1| = %.3e (limit 1e-9)", worst));

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 5.0) fails.push_back(fmt("runtime %.2f s (limit 5 s)", secs));
    return fails;
}

// ---------------------------------------------------------------------------
// 2. WOLA identity and the Princen-Bradley window family

Failures criterion_wola_identity() {
    Failures fails;

    for (int L : {256, 512, 1024, 2048}) {
        const auto w = make_window({L, WindowKind::vorbis});
        double worst = 0.0;
        for (int n = 0; n < L / 2; ++n) {
            worst = std::max(worst, std::abs(w[n] * w[n] + w[n + L / 2] * w[n + L / 2] - 1.0));
        }
        if (worst >= 1e-9) {
            fails.push_back("Princen-Bradley violated at L=" + std::to_string(L) + ": " +
                            fmt("%.3e", worst));
        }
    }

    // ten seconds of noise, rounded up to whole hops
    const std::size_t n = 862 * 512;
    const auto x = white_noise(n, 8101, 0.5f);
    const auto y = wola_identity({1024, WindowKind::vorbis}, x);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(y[i]) - x[i]));
    }
    if (worst >= 1e-6) fails.push_back(fmt("identity max error %.3e (limit 1e-6)", worst));
    return fails;
}

// ---------------------------------------------------------------------------
// 3. stability fuzz: one minute of noise through the full update recursion

Failures criterion_stability_fuzz() {
    Failures fails;
    const std::size_t n = static_cast<std::size_t>(60) * 44100;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ScalConfig cfg;
        cfg.seed = seed;
        const auto x = white_noise(n, 77000 + seed, 0.5f);
        const auto y = scal_process(cfg, x);

        float in_max = 0.0f, out_max = 0.0f;
        bool finite = true;
        for (float v : x) in_max = std::max(in_max, std::abs(v));
        for (float v : y) {
            finite = finite && std::isfinite(v);
            out_max = std::max(out_max, std::abs(v));
        }
        if (!finite) fails.push_back("non-finite sample, seed " + std::to_string(seed));
        if (out_max > 4.0f * in_max) {
            fails.push_back("seed " + std::to_string(seed) + ": |out| " + fmt("%.3f", out_max) +
                            " exceeds 4x input peak " + fmt("%.3f", in_max));
        }
    }
    return fails;
}

// ---------------------------------------------------------------------------
// 4. coherence estimator oracle checks

Failures criterion_coherence_oracle() {
    Failures fails;

    const auto x = white_noise(44100 * 20, 4001, 0.5f);
    const auto ident = coherence(x, x, 1024, 100, 44100);
    for (double g : ident.gamma_sq) {
        if (std::abs(g - 1.0) >= 1e-9) {
            fails.push_back(fmt("identical-channel gamma^2 off by %.3e", std::abs(g - 1.0)));
            break;
        }
    }

    const auto a = white_noise(44100 * 5, 4002, 0.5f);
    const auto b = white_noise(44100 * 5, 4003, 0.5f);
    const auto ind = coherence(a, b, 1024, 100, 44100);
    double mean = 0.0;
    for (double g : ind.gamma_sq) mean += g;
    mean /= static_cast<double>(ind.gamma_sq.size());
    if (mean >= 0.05) fails.push_back(fmt("independent-noise mean gamma^2 %.4f (limit 0.05)", mean));

    std::vector<float> h = {1.0f, 0.5f, 0.25f};
    auto y = convolve(x, h);
    y.resize(x.size());
    const int fft_size = 8192;
    const int blocks = static_cast<int>(x.size() / (fft_size / 2)) - 1;
    const auto filt = coherence(x, y, fft_size, blocks, 44100);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < filt.gamma_sq.size(); ++k) {
        worst = std::max(worst, std::abs(filt.gamma_sq[k] - 1.0));
    }
    if (worst >= 1e-6) fails.push_back(fmt("filter invariance off by %.3e (limit 1e-6)", worst));
    return fails;
}

// ---------------------------------------------------------------------------
// 5. decorrelation effect on a coherent stereo pair

Failures criterion_decorrelation() {
    Failures fails;
    const auto t0 = std::chrono::steady_clock::now();

    const int fs = 44100;
    const auto src = speech_like(static_cast<std::size_t>(fs) * 30, fs, 5001);
    const auto ir_l = synth_room_ir(20.0, 2048, fs, 5002, "remote_L");
    const auto ir_r = synth_room_ir(20.0, 2048, fs, 5003, "remote_R");
    const auto far = simulate_remote(src, ir_l, ir_r, fs);

    const int fft_size = 16384;
    const int blocks = static_cast<int>(far.num_frames() / (fft_size / 2)) - 1;

    const auto unproc = coherence(far.channel(0), far.channel(1), fft_size, blocks, fs);
    const double unproc_avg = band_average(unproc, 2000.0, 20000.0);
    if (unproc_avg <= 0.99) {
        fails.push_back(fmt("unprocessed band-averaged gamma^2 %.4f (needs > 0.99)", unproc_avg));
    }

    DecorrelatorConfig scal_cfg;
    scal_cfg.method = Method::scal;
    scal_cfg.seed = 5004;
    const auto scal_pair = apply_decorrelator(scal_cfg, far);
    const auto scal_spec =
        coherence(scal_pair.channel(0), scal_pair.channel(1), fft_size, blocks, fs);
    const double scal_avg = band_average(scal_spec, 2000.0, 20000.0);
    if (scal_avg >= 0.9) {
        fails.push_back(fmt("scal band-averaged gamma^2 %.4f (needs < 0.9)", scal_avg));
    }

    double scal_worst_bin = 0.0;
    for (std::size_t k = 0; k < scal_spec.gamma_sq.size(); ++k) {
        const double f = scal_spec.bin_hz(static_cast<int>(k));
        if (f >= 2000.0 && f < 20000.0) scal_worst_bin = std::max(scal_worst_bin, scal_spec.gamma_sq[k]);
    }
    if (scal_worst_bin > 0.98) {
        fails.push_back(fmt("scal leaves a bin at gamma^2 %.4f (needs none above 0.98)",
                            scal_worst_bin));
    }

    // the fixed-order comb keeps near-unity coherence at its phase nulls
    // (k fs / 7); a long host window and a fine measurement grid isolate the
    // null from frame-boundary effects and neighbouring decorrelated bins
    DecorrelatorConfig comb_cfg;
    comb_cfg.method = Method::comb;
    comb_cfg.seed = 5005;
    comb_cfg.scal.window.length = 8192;
    const auto comb_pair = apply_decorrelator(comb_cfg, far);
    const int null_fft = 65536;
    const int null_blocks = static_cast<int>(far.num_frames() / (null_fft / 2)) - 1;
    const auto comb_spec =
        coherence(comb_pair.channel(0), comb_pair.channel(1), null_fft, null_blocks, fs);
    double comb_null_best = 0.0;
    for (int k = 1; k <= 3; ++k) {
        const double f_null = static_cast<double>(k) * fs / 7.0;
        if (f_null < 2000.0 || f_null >= 20000.0) continue;
        const int bin = static_cast<int>(std::round(f_null * null_fft / fs));
        comb_null_best = std::max(comb_null_best, comb_spec.gamma_sq[static_cast<std::size_t>(bin)]);
    }
    if (comb_null_best <= 0.95) {
        fails.push_back(fmt("comb phase-null gamma^2 %.4f (needs > 0.95 at a null bin)",
                            comb_null_best));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 60.0) fails.push_back(fmt("runtime %.1f s (limit 60 s)", secs));
    return fails;
}

// ---------------------------------------------------------------------------
// 6. echo-cancellation ordering at the 16 kHz desk scale

Failures criterion_echo_ordering() {
    Failures fails;
    const auto t0 = std::chrono::steady_clock::now();

    EchoSimConfig cfg;
    cfg.sample_rate = 16000;
    cfg.duration_s = 10.0;
    cfg.snr_db = 40.0;
    cfg.remote_rt60_ms = 20.0;
    cfg.remote_ir_length = 1024;
    cfg.near_rt60_ms = 200.0;
    cfg.near_ir_length = 1024;
    cfg.aec.filter_length = 1024;
    cfg.aec.block_size = 256;
    cfg.seed = 6001;

    const auto n = static_cast<std::size_t>(cfg.duration_s * cfg.sample_rate);
    const std::vector<SimMaterial> material = {{"white", white_noise(n, 6002, 0.25f)}};

    // SNR calibration on the exact near-end used by the stereo runs
    {
        const auto ir_l = synth_room_ir(cfg.near_rt60_ms, cfg.near_ir_length, cfg.sample_rate,
                                        child_seed(cfg.seed, 3));
        const auto ir_r = synth_room_ir(cfg.near_rt60_ms, cfg.near_ir_length, cfg.sample_rate,
                                        child_seed(cfg.seed, 4));
        const auto remote_l = synth_room_ir(cfg.remote_rt60_ms, cfg.remote_ir_length,
                                            cfg.sample_rate, child_seed(cfg.seed, 1));
        const auto remote_r = synth_room_ir(cfg.remote_rt60_ms, cfg.remote_ir_length,
                                            cfg.sample_rate, child_seed(cfg.seed, 2));
        const auto far = simulate_remote(material[0].samples, remote_l, remote_r, cfg.sample_rate);
        NearEndSetup clean;
        clean.speaker_to_mic = {ir_l, ir_r};
        clean.snr_db = std::numeric_limits<double>::infinity();
        NearEndSetup noisy = clean;
        noisy.snr_db = cfg.snr_db;
        noisy.noise_seed = child_seed(cfg.seed, 5);
        const auto mic_clean = render_near_mic(far, clean);
        const auto mic_noisy = render_near_mic(far, noisy);
        double sig = 0.0, noise = 0.0;
        for (std::size_t i = 0; i < mic_clean.size(); ++i) {
            sig += static_cast<double>(mic_clean[i]) * mic_clean[i];
            const double d = static_cast<double>(mic_noisy[i]) - mic_clean[i];
            noise += d * d;
        }
        const double measured = 10.0 * std::log10(sig / noise);
        if (std::abs(measured - cfg.snr_db) > 0.1) {
            fails.push_back(fmt("SNR calibration %.3f dB (needs 40 +- 0.1)", measured));
        }
    }

    auto named = [](const char* name, Method m, std::uint64_t seed) {
        SimAlgorithm a;
        a.name = name;
        a.decorrelator.method = m;
        a.decorrelator.seed = seed;
        return a;
    };

    EchoSimConfig mono_cfg = cfg;
    mono_cfg.mono = true;
    const double mono = run_comparison(mono_cfg, {named("none", Method::none, 1)}, material)
                            .runs[0]
                            .final_misalignment_db;

    const auto rep = run_comparison(cfg,
                                    {named("none", Method::none, 1),
                                     named("scal", Method::scal, 6003),
                                     named("comb", Method::comb, 6004)},
                                    material);
    const double none_db = rep.runs[0].final_misalignment_db;
    const double scal_db = rep.runs[1].final_misalignment_db;
    const double comb_db = rep.runs[2].final_misalignment_db;

    std::printf("    mono %.2f dB | stereo none %.2f | scal %.2f | comb %.2f\n", mono, none_db,
                scal_db, comb_db);

    if (mono >= -20.0) fails.push_back(fmt("mono sanity %.2f dB (needs < -20)", mono));
    if (none_db < mono + 5.0) {
        fails.push_back(fmt("stereo unprocessed %.2f dB is not >= 5 dB worse than mono", none_db));
    }
    if (scal_db > none_db - 5.0) {
        fails.push_back(fmt("scal %.2f dB does not improve on unprocessed by 5 dB", scal_db));
    }
    if (std::abs(scal_db - comb_db) > 3.0) {
        fails.push_back(fmt("scal and comb differ by %.2f dB (limit 3)", std::abs(scal_db - comb_db)));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 600.0) fails.push_back(fmt("runtime %.0f s (limit 600 s)", secs));
    return fails;
}

// ---------------------------------------------------------------------------
// 7. masked-noise ceiling, emphasis, and silence

Failures criterion_masked_noise() {
    Failures fails;
    const int fs = 44100;
    const std::size_t n = static_cast<std::size_t>(fs) * 10;
    const auto input = pink_noise(n, 7001, 0.25f);

    NoiseInjectorConfig cfg;
    cfg.seed = 7002;
    NoiseInjector injector(cfg, fs);
    injector.set_dump_enabled(true);
    const auto out = injector.process(input);

    // per-frame synthesized power never exceeds the threshold
    double worst_frame = -1e9;
    for (const auto& row : injector.dump_rows()) {
        if (row.threshold_db <= -250.0) continue;
        worst_frame = std::max(worst_frame, row.injected_db - row.threshold_db);
    }
    if (worst_frame > 1.0) {
        fails.push_back(fmt("per-frame injected exceeds threshold by %.2f dB", worst_frame));
    }

    // stream-level: long rectangular Welch vs time-averaged thresholds
    {
        const auto& bands = injector.bands();
        const auto& noise = injector.noise_stream();
        const int hop = cfg.window.hop();
        const int n_frames = static_cast<int>(noise.size()) / hop - 1;
        std::vector<std::vector<double>> thr(static_cast<std::size_t>(n_frames) + 2,
                                             std::vector<double>(bands.num_bands(), 0.0));
        for (const auto& row : injector.dump_rows()) {
            if (row.frame < static_cast<long>(thr.size())) {
                thr[static_cast<std::size_t>(row.frame)][row.band] =
                    std::pow(10.0, row.threshold_db / 10.0);
            }
        }
        std::vector<double> thr_avg(bands.num_bands(), 0.0);
        for (int f = 0; f < n_frames; ++f) {
            for (int b = 0; b < bands.num_bands(); ++b) thr_avg[b] += thr[f][b] / n_frames;
        }

        const int sub = 16384;
        const int n_sub = static_cast<int>(noise.size()) / sub;
        std::vector<double> meas(bands.num_bands(), 0.0), buf(sub);
        for (int s = 0; s < n_sub; ++s) {
            for (int i = 0; i < sub; ++i) buf[i] = noise[static_cast<std::size_t>(s) * sub + i];
            const auto spec = rfft(buf);
            const double scale = 2.0 / (static_cast<double>(sub) * sub) / n_sub;
            for (std::size_t k = 0; k < spec.size(); ++k) {
                const double f = static_cast<double>(k) * fs / sub;
                const int band =
                    std::min(static_cast<int>(std::floor(bark_of_hz(f))), bands.num_bands() - 1);
                const double m = (k == 0 || static_cast<int>(k) == sub / 2) ? 0.5 : 1.0;
                meas[band] += scale * m * std::norm(spec[k]);
            }
        }
        double worst = -1e9;
        for (int b = 0; b < bands.num_bands(); ++b) {
            if (thr_avg[b] <= 0.0) continue;
            worst = std::max(worst, 10.0 * std::log10(meas[b] / thr_avg[b]));
        }
        if (worst > 1.0) {
            fails.push_back(fmt("stream band power exceeds threshold by %.2f dB (limit 1)", worst));
        }
    }

    // low-band emphasis on the injected noise
    {
        const auto& noise = injector.noise_stream();
        const int sub = 16384;
        const int n_sub = static_cast<int>(noise.size()) / sub;
        std::vector<double> buf(sub);
        double low = 0.0, high = 0.0;
        for (int s = 0; s < n_sub; ++s) {
            for (int i = 0; i < sub; ++i) buf[i] = noise[static_cast<std::size_t>(s) * sub + i];
            const auto spec = rfft(buf);
            for (std::size_t k = 0; k < spec.size(); ++k) {
                const double f = static_cast<double>(k) * fs / sub;
                if (f < 1500.0) low += std::norm(spec[k]);
                if (f >= 4000.0 && f < 8000.0) high += std::norm(spec[k]);
            }
        }
        const double contrast = 10.0 * std::log10(low / high);
        if (contrast < 3.0) {
            fails.push_back(fmt("lowband/highband noise contrast %.2f dB (needs >= 3)", contrast));
        }
    }

    // silence in, bit-identical silence out
    {
        std::vector<float> silent(n, 0.0f);
        const auto silent_out = inject_noise(cfg, silent, fs);
        if (silent_out != silent) fails.push_back("silent input did not stay bit-identical");
    }

    (void)out;
    return fails;
}

// ---------------------------------------------------------------------------
// 8. determinism of the full pipelines

Failures criterion_determinism() {
    Failures fails;
    namespace fs_ = std::filesystem;
    const auto dir = fs_::temp_directory_path() / "scald_acceptance_det";
    fs_::create_directories(dir);

    const int fs = 44100;
    const auto src = speech_like(static_cast<std::size_t>(fs) * 5, fs, 8001);
    AudioBuffer in = make_stereo(fs, src, src);

    DecorrelatorConfig cfg;
    cfg.method = Method::scal;
    cfg.with_noise = true;
    cfg.seed = 8002;

    auto read_bytes = [](const fs_::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), {});
    };

    const auto out1 = apply_decorrelator(cfg, in);
    const auto out2 = apply_decorrelator(cfg, in);
    if (out1.channels != out2.channels) fails.push_back("processing rerun differs in memory");

    write_wav(dir / "a.wav", out1, WavFormat::pcm16);
    write_wav(dir / "b.wav", out2, WavFormat::pcm16);
    if (read_bytes(dir / "a.wav") != read_bytes(dir / "b.wav")) {
        fails.push_back("WAV outputs differ between reruns");
    }

    EchoSimConfig sim;
    sim.sample_rate = 16000;
    sim.duration_s = 4.0;
    sim.remote_rt60_ms = 20.0;
    sim.remote_ir_length = 512;
    sim.near_rt60_ms = 100.0;
    sim.near_ir_length = 512;
    sim.aec.filter_length = 512;
    sim.aec.block_size = 128;
    sim.seed = 8003;
    const auto na = static_cast<std::size_t>(sim.duration_s * sim.sample_rate);
    const std::vector<SimMaterial> mats = {{"white", white_noise(na, 8004, 0.25f)}};
    SimAlgorithm algo;
    algo.name = "scal";
    algo.decorrelator.method = Method::scal;
    algo.decorrelator.seed = 8005;

    const auto r1 = run_comparison(sim, {algo}, mats);
    const auto r2 = run_comparison(sim, {algo}, mats);
    const bool same = r1.runs[0].final_misalignment_db == r2.runs[0].final_misalignment_db &&
                      r1.runs[0].band_coherence == r2.runs[0].band_coherence &&
                      r1.runs[0].trace.eta_db == r2.runs[0].trace.eta_db;
    if (!same) fails.push_back("simulation rerun differs outside timing fields");

    fs_::remove_all(dir);
    return fails;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Failures()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "allpass flatness", criterion_flatness},
        {2, "WOLA identity and Princen-Bradley windows", criterion_wola_identity},
        {3, "stability fuzz", criterion_stability_fuzz},
        {4, "coherence estimator oracle", criterion_coherence_oracle},
        {5, "decorrelation effect", criterion_decorrelation},
        {6, "echo-cancellation ordering", criterion_echo_ordering},
        {7, "masked-noise ceiling and emphasis", criterion_masked_noise},
        {8, "determinism", criterion_determinism},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Failures fails;
        try {
            fails = c.run();
        } catch (const std::exception& e) {
            fails.push_back(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d: %s (%.1f s)\n", fails.empty() ? "PASS" : "FAIL", c.id,
                    c.title, secs);
        for (const auto& f : fails) std::printf("       %s\n", f.c_str());
        failures += static_cast<int>(fails.size());
    }
    return failures == 0 ? 0 : 1;
}
