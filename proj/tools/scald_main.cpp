// scald - stereo channel decorrelation toolkit
//
// Subcommands:
//   process   apply a decorrelator (and/or masked noise) to a WAV file
//   analyze   inter-channel coherence spectrum and band summary of a stereo WAV
//   simulate  synthetic stereo echo-cancellation run from a JSON config
//   compare   multi-algorithm echo-cancellation comparison from a JSON config
//   freqz     frequency response dump of the comb-allpass family
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numeric failure.

#include "scald/aecsim.hpp"
#include "scald/analysis.hpp"
#include "scald/errors.hpp"
#include "scald/pipeline.hpp"
#include "scald/signals.hpp"
#include "scald/wav.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SCALD_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw scald::ConfigError("SCALD_SEED is not an unsigned integer: " +
                                     std::string(env));
        }
    }
    return 1;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw scald::IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw scald::IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw scald::IoError("failed to move " + tmp.string() + " into place: " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// process

struct ProcessOptions {
    std::string in_path, out_path;
    std::string method = "none";
    std::string form = "flat";
    std::string format; // empty = keep input format
    std::string dump_prefix;
    scald::DecorrelatorConfig cfg;
    std::optional<std::uint64_t> seed;
    int window_length = 1024;
};

int run_process(const ProcessOptions& opt) {
    scald::DecorrelatorConfig cfg = opt.cfg;

    std::string method = opt.method;
    if (method == "scal+noise") {
        method = "scal";
        cfg.with_noise = true;
    }
    cfg.method = scald::method_from_name(method);
    cfg.seed = opt.seed.value_or(default_seed());
    cfg.scal.window.length = opt.window_length;
    cfg.noise.window.length = opt.window_length;
    if (opt.form == "literal") {
        cfg.scal.form = scald::AllpassForm::literal;
    } else if (opt.form == "flat") {
        cfg.scal.form = scald::AllpassForm::flat;
    } else {
        throw scald::ConfigError("--form must be flat or literal, got " + opt.form);
    }

    const auto wav = scald::read_wav(opt.in_path);
    if (wav.audio.num_channels() > 2) {
        throw scald::ConfigError("process expects a 1- or 2-channel file, got " +
                                 std::to_string(wav.audio.num_channels()) + " channels");
    }
    cfg.validate(wav.audio.sample_rate);

    scald::AudioBuffer out = scald::apply_decorrelator(cfg, wav.audio);

    if (!opt.dump_prefix.empty() && (cfg.with_noise || cfg.method == scald::Method::noise)) {
        // re-run the noise stage with dumping enabled on the filtered signal
        scald::DecorrelatorConfig filter_only = cfg;
        filter_only.with_noise = false;
        if (filter_only.method == scald::Method::noise) filter_only.method = scald::Method::none;
        const auto filtered = scald::apply_decorrelator(filter_only, wav.audio);
        for (int c = 0; c < filtered.num_channels(); ++c) {
            scald::NoiseInjectorConfig nc = cfg.noise;
            nc.seed = scald::child_seed(cfg.seed, 16 + static_cast<std::uint64_t>(c));
            scald::NoiseInjector injector(nc, filtered.sample_rate);
            injector.set_dump_enabled(true);
            (void)injector.process(filtered.channel(c));
            std::ostringstream os;
            scald::write_threshold_csv(os, injector.dump_rows());
            write_text_atomic(opt.dump_prefix + ".ch" + std::to_string(c) + ".csv", os.str());
        }
    }

    scald::WavFormat format = wav.format;
    if (opt.format == "pcm16") format = scald::WavFormat::pcm16;
    else if (opt.format == "float32") format = scald::WavFormat::float32;
    else if (!opt.format.empty()) {
        throw scald::ConfigError("--output-format must be pcm16 or float32");
    }
    scald::write_wav(opt.out_path, out, format);
    return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
    std::string in_path;
    std::string coherence_csv;
    std::string bands_json;
    int fft_size = 4096;
    int blocks = 0; // 0 = every available block
};

int run_analyze(const AnalyzeOptions& opt) {
    const auto wav = scald::read_wav(opt.in_path);
    if (wav.audio.num_channels() != 2) {
        throw scald::ConfigError("analyze needs a stereo file, got " +
                                 std::to_string(wav.audio.num_channels()) + " channel(s)");
    }
    const auto frames = wav.audio.num_frames();
    const int hop = opt.fft_size / 2;
    int blocks = opt.blocks;
    if (blocks == 0) {
        blocks = static_cast<int>(frames / static_cast<std::size_t>(hop)) - 1;
    }
    if (blocks < 2) {
        throw scald::ConfigError(
            "insufficient data: " + std::to_string(frames) + " frames provide fewer than the " +
            std::to_string(3 * hop) + " needed for two " + std::to_string(opt.fft_size) +
            "-point blocks; use a longer file or a smaller --fft-size");
    }
    const auto spec = scald::coherence(wav.audio.channel(0), wav.audio.channel(1), opt.fft_size,
                                       blocks, wav.audio.sample_rate);

    if (!opt.coherence_csv.empty()) {
        std::ostringstream os;
        scald::write_coherence_csv(os, spec);
        write_text_atomic(opt.coherence_csv, os.str());
    }

    const double nyquist = 0.5 * wav.audio.sample_rate;
    json bands;
    bands["0-1500"] = scald::band_average(spec, 0.0, std::min(1500.0, nyquist));
    if (nyquist > 1500.0) bands["1500-2000"] = scald::band_average(spec, 1500.0, std::min(2000.0, nyquist));
    if (nyquist > 2000.0) bands["2000-nyquist"] = scald::band_average(spec, 2000.0, nyquist);

    json summary;
    summary["schema_version"] = 1;
    summary["sample_rate"] = wav.audio.sample_rate;
    summary["fft_size"] = opt.fft_size;
    summary["n_blocks"] = blocks;
    summary["full_band"] = scald::band_average(spec, 0.0, nyquist);
    summary["bands"] = bands;

    const std::string text = summary.dump(2) + "\n";
    if (!opt.bands_json.empty()) {
        write_text_atomic(opt.bands_json, text);
    } else {
        std::cout << text;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / compare

struct SchemaErrors {
    std::vector<std::string> errors;

    void require(bool ok, const std::string& path, const std::string& what) {
        if (!ok) errors.push_back(path + ": " + what);
    }
    void raise_if_any() const {
        if (errors.empty()) return;
        std::string msg = "config schema violations:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw scald::ConfigError(msg);
    }
};

double num_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

scald::DecorrelatorConfig parse_algorithm(const json& j, std::uint64_t master_seed,
                                          SchemaErrors& schema, const std::string& path) {
    scald::DecorrelatorConfig cfg;
    schema.require(j.contains("method") && j.at("method").is_string(), path + ".method",
                   "required string (none|scal|comb|allpass|smoothed_abs|noise)");
    schema.raise_if_any();
    cfg.method = scald::method_from_name(j.at("method").get<std::string>());
    cfg.with_noise = j.value("with_noise", false);
    cfg.seed = j.value("seed", master_seed);

    cfg.scal.beta = num_or(j, "beta", cfg.scal.beta);
    cfg.scal.n_min = static_cast<int>(num_or(j, "n_min", cfg.scal.n_min));
    cfg.scal.n_max = static_cast<int>(num_or(j, "n_max", cfg.scal.n_max));
    cfg.scal.r_max = num_or(j, "r_max", cfg.scal.r_max);
    cfg.scal.epsilon = num_or(j, "epsilon", cfg.scal.epsilon);
    cfg.scal.window.length = static_cast<int>(num_or(j, "window_length", cfg.scal.window.length));
    if (j.value("form", "flat") == std::string("literal")) {
        cfg.scal.form = scald::AllpassForm::literal;
    }
    cfg.comb_order = static_cast<int>(num_or(j, "comb_order", cfg.comb_order));
    cfg.allpass.alpha_min = num_or(j, "alpha_min", cfg.allpass.alpha_min);
    cfg.allpass.walk_step = num_or(j, "walk_step", cfg.allpass.walk_step);
    cfg.smoothed.alpha_abs = num_or(j, "alpha_abs", cfg.smoothed.alpha_abs);
    cfg.smoothed.smoothing_delta = num_or(j, "smoothing_delta", cfg.smoothed.smoothing_delta);
    cfg.noise.window.length = cfg.scal.window.length;
    cfg.noise.threshold_offset_db = num_or(j, "noise_offset_db", cfg.noise.threshold_offset_db);
    cfg.noise.lowband_emphasis_db = num_or(j, "noise_emphasis_db", cfg.noise.lowband_emphasis_db);
    cfg.noise.highband_rolloff_db = num_or(j, "noise_rolloff_db", cfg.noise.highband_rolloff_db);
    return cfg;
}

json preset_config(const std::string& name) {
    json cfg;
    if (name == "mono_sanity") {
        cfg["mono"] = true;
        cfg["material"] = json::array({{{"name", "white"}, {"type", "white_noise"}}});
        cfg["algorithms"] = json::array({{{"name", "none"}, {"method", "none"}}});
    } else if (name == "desk_compare") {
        cfg["material"] = json::array({{{"name", "white"}, {"type", "white_noise"}},
                                       {{"name", "speech"}, {"type", "speech_like"}}});
        cfg["algorithms"] = json::array({{{"name", "none"}, {"method", "none"}},
                                         {{"name", "scal"}, {"method", "scal"}},
                                         {{"name", "comb"}, {"method", "comb"}},
                                         {{"name", "allpass"}, {"method", "allpass"}},
                                         {{"name", "smoothed_abs"}, {"method", "smoothed_abs"}}});
    } else {
        throw scald::ConfigError("unknown preset '" + name +
                                 "' (expected mono_sanity or desk_compare)");
    }
    return cfg;
}

int run_simulate(const std::string& config_path, const std::string& report_path,
                 const std::string& traces_dir, const std::string& dump_audio_dir,
                 bool require_single) {
    json raw;
    {
        std::ifstream in(config_path);
        if (!in) throw scald::IoError("cannot open config " + config_path);
        try {
            in >> raw;
        } catch (const json::exception& e) {
            throw scald::ConfigError("config is not valid JSON: " + std::string(e.what()));
        }
    }

    json cfg_json;
    if (raw.contains("preset")) cfg_json = preset_config(raw.at("preset").get<std::string>());
    for (const auto& [key, value] : raw.items()) {
        if (key != "preset") cfg_json[key] = value;
    }

    SchemaErrors schema;
    schema.require(cfg_json.value("schema_version", 0) == 1, "$.schema_version", "must be 1");
    schema.require(cfg_json.contains("material") && cfg_json["material"].is_array() &&
                       !cfg_json["material"].empty(),
                   "$.material", "required non-empty array");
    schema.require(cfg_json.contains("algorithms") && cfg_json["algorithms"].is_array() &&
                       !cfg_json["algorithms"].empty(),
                   "$.algorithms", "required non-empty array");
    schema.raise_if_any();

    scald::EchoSimConfig sim;
    sim.sample_rate = static_cast<int>(num_or(cfg_json, "sample_rate", 16000));
    sim.duration_s = num_or(cfg_json, "duration_s", 10.0);
    sim.snr_db = num_or(cfg_json, "snr_db", 40.0);
    sim.seed = cfg_json.value("seed", default_seed());
    sim.mono = cfg_json.value("mono", false);
    sim.misalignment_interval_s = num_or(cfg_json, "misalignment_interval_s", 0.5);
    if (cfg_json.contains("remote")) {
        sim.remote_rt60_ms = num_or(cfg_json["remote"], "rt60_ms", sim.remote_rt60_ms);
        sim.remote_ir_length =
            static_cast<int>(num_or(cfg_json["remote"], "ir_length", sim.remote_ir_length));
    }
    if (cfg_json.contains("near")) {
        sim.near_rt60_ms = num_or(cfg_json["near"], "rt60_ms", sim.near_rt60_ms);
        sim.near_ir_length =
            static_cast<int>(num_or(cfg_json["near"], "ir_length", sim.near_ir_length));
    }
    if (cfg_json.contains("aec")) {
        const auto& a = cfg_json["aec"];
        sim.aec.filter_length = static_cast<int>(num_or(a, "filter_length", sim.aec.filter_length));
        sim.aec.block_size = static_cast<int>(num_or(a, "block_size", sim.aec.block_size));
        sim.aec.learning_rate = num_or(a, "learning_rate", sim.aec.learning_rate);
        sim.aec.regularization = num_or(a, "regularization", sim.aec.regularization);
    }
    sim.debug_dump_dir = dump_audio_dir;
    sim.validate();

    const auto n = static_cast<std::size_t>(sim.duration_s * sim.sample_rate);
    std::vector<scald::SimMaterial> materials;
    int mat_index = 0;
    for (const auto& m : cfg_json["material"]) {
        const std::string path = "$.material[" + std::to_string(mat_index) + "]";
        schema.require(m.contains("type") && m.at("type").is_string(), path + ".type",
                       "required string (white_noise|pink_noise|speech_like|wav)");
        schema.raise_if_any();
        const std::string type = m.at("type").get<std::string>();
        const std::uint64_t mat_seed =
            m.value("seed", scald::child_seed(sim.seed, 100 + static_cast<std::uint64_t>(mat_index)));
        scald::SimMaterial mat;
        mat.name = m.value("name", type + std::to_string(mat_index));
        if (type == "white_noise") {
            mat.samples = scald::white_noise(n, mat_seed, 0.25f);
        } else if (type == "pink_noise") {
            mat.samples = scald::pink_noise(n, mat_seed, 0.25f);
        } else if (type == "speech_like") {
            mat.samples = scald::speech_like(n, sim.sample_rate, mat_seed);
        } else if (type == "wav") {
            schema.require(m.contains("path"), path + ".path", "required for type wav");
            schema.raise_if_any();
            const auto wav = scald::read_wav(m.at("path").get<std::string>());
            if (wav.audio.sample_rate != sim.sample_rate) {
                throw scald::ConfigError(path + ": wav sample rate " +
                                         std::to_string(wav.audio.sample_rate) +
                                         " does not match the simulation rate " +
                                         std::to_string(sim.sample_rate));
            }
            mat.samples.assign(wav.audio.channel(0).begin(), wav.audio.channel(0).end());
        } else {
            throw scald::ConfigError(path + ".type: unknown material type '" + type + "'");
        }
        materials.push_back(std::move(mat));
        ++mat_index;
    }

    std::vector<scald::SimAlgorithm> algorithms;
    int algo_index = 0;
    for (const auto& a : cfg_json["algorithms"]) {
        const std::string path = "$.algorithms[" + std::to_string(algo_index) + "]";
        scald::SimAlgorithm algo;
        algo.decorrelator = parse_algorithm(
            a, scald::child_seed(sim.seed, 200 + static_cast<std::uint64_t>(algo_index)), schema,
            path);
        algo.name = a.value("name", scald::method_name(algo.decorrelator.method));
        algorithms.push_back(std::move(algo));
        ++algo_index;
    }
    if (require_single && algorithms.size() != 1) {
        throw scald::ConfigError("simulate expects exactly one algorithm; use compare for suites");
    }

    const auto report = scald::run_comparison(sim, algorithms, materials);

    json out;
    out["schema_version"] = 1;
    out["config"] = cfg_json;
    out["runs"] = json::array();
    for (const auto& run : report.runs) {
        json r;
        r["algorithm"] = run.algorithm;
        r["material"] = run.material;
        r["final_misalignment_db"] = run.final_misalignment_db;
        r["inverse_final_misalignment_db"] = -run.final_misalignment_db;
        if (!sim.mono) r["band_coherence_2k_up"] = run.band_coherence;
        r["runtime_s"] = run.runtime_s;

        if (!traces_dir.empty()) {
            const fs::path trace_path =
                fs::path(traces_dir) / (run.algorithm + "_" + run.material + ".csv");
            std::ostringstream os;
            scald::write_trace_csv(os, run.trace);
            write_text_atomic(trace_path, os.str());
            r["trace_csv"] = trace_path.string();
        }
        out["runs"].push_back(std::move(r));
    }

    const std::string text = out.dump(2) + "\n";
    if (!report_path.empty()) {
        write_text_atomic(report_path, text);
    } else {
        std::cout << text;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// freqz

int run_freqz(double alpha, double beta, int order, const std::string& form, int bins,
              const std::string& out_path) {
    const auto f = scald::scal_coefficients(
        alpha, beta, order,
        form == "literal" ? scald::AllpassForm::literal : scald::AllpassForm::flat);
    if (!scald::check_stability(alpha, beta)) {
        throw scald::ConfigError("frequency response of an unstable filter: |alpha|(1+|beta|) >= 1");
    }
    std::ostringstream os;
    scald::write_frequency_response_csv(os, scald::frequency_response(f, bins));
    if (!out_path.empty()) {
        write_text_atomic(out_path, os.str());
    } else {
        std::cout << os.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scald - stereo channel decorrelation toolkit"};
    app.require_subcommand(1);

    ProcessOptions popt;
    auto* process = app.add_subcommand("process", "decorrelate a WAV file");
    process->add_option("--in", popt.in_path, "input WAV (1 or 2 channels)")->required();
    process->add_option("--out", popt.out_path, "output WAV")->required();
    process
        ->add_option("--method", popt.method,
                     "none|scal|comb|allpass|smoothed_abs|noise|scal+noise")
        ->required();
    std::uint64_t seed_flag = 0;
    auto* seed_opt = process->add_option("--seed", seed_flag, "master seed (default $SCALD_SEED or 1)");
    process->add_option("--beta", popt.cfg.scal.beta, "scal tilt");
    process->add_option("--nmin", popt.cfg.scal.n_min, "scal minimum order");
    process->add_option("--nmax", popt.cfg.scal.n_max, "scal maximum order");
    process->add_option("--rmax", popt.cfg.scal.r_max, "per-window alpha step bound");
    process->add_option("--epsilon", popt.cfg.scal.epsilon, "pole margin");
    process->add_option("--form", popt.form, "flat|literal comb coefficients");
    process->add_option("--window-length", popt.window_length, "analysis window length");
    process->add_option("--comb-order", popt.cfg.comb_order, "comb baseline order");
    process->add_option("--alpha-min", popt.cfg.allpass.alpha_min, "first-order allpass bound");
    process->add_option("--walk-step", popt.cfg.allpass.walk_step, "first-order walk step");
    process->add_option("--alpha-abs", popt.cfg.smoothed.alpha_abs, "smoothed-abs gain");
    process->add_option("--noise-offset-db", popt.cfg.noise.threshold_offset_db,
                        "masked-noise offset below the masker");
    process->add_option("--noise-emphasis-db", popt.cfg.noise.lowband_emphasis_db,
                        "extra allowance below 1.5 kHz");
    process->add_option("--noise-rolloff-db", popt.cfg.noise.highband_rolloff_db,
                        "reduction above 2 kHz");
    process->add_option("--output-format", popt.format, "pcm16|float32 (default: input format)");
    process->add_option("--dump-thresholds", popt.dump_prefix,
                        "CSV prefix for per-channel threshold dumps");

    AnalyzeOptions aopt;
    auto* analyze = app.add_subcommand("analyze", "coherence analysis of a stereo WAV");
    analyze->add_option("--in", aopt.in_path, "input stereo WAV")->required();
    analyze->add_option("--coherence-csv", aopt.coherence_csv, "per-bin gamma^2 CSV path");
    analyze->add_option("--bands-json", aopt.bands_json, "band summary JSON path (default stdout)");
    analyze->add_option("--fft-size", aopt.fft_size, "welch block size");
    analyze->add_option("--blocks", aopt.blocks, "number of averaged blocks (default: all)");

    std::string sim_config, sim_report, sim_traces, sim_dump;
    auto* simulate = app.add_subcommand("simulate", "echo-cancellation simulation (one algorithm)");
    simulate->add_option("--config", sim_config, "JSON config")->required();
    simulate->add_option("--report", sim_report, "report JSON path (default stdout)");
    simulate->add_option("--traces-dir", sim_traces, "directory for misalignment trace CSVs");
    simulate->add_option("--dump-audio-dir", sim_dump, "debug: write per-run far/mic WAVs here");

    std::string cmp_config, cmp_report, cmp_traces, cmp_dump;
    auto* compare = app.add_subcommand("compare", "multi-algorithm comparison");
    compare->add_option("--config", cmp_config, "JSON config")->required();
    compare->add_option("--report", cmp_report, "report JSON path (default stdout)");
    compare->add_option("--traces-dir", cmp_traces, "directory for misalignment trace CSVs");
    compare->add_option("--dump-audio-dir", cmp_dump, "debug: write per-run far/mic WAVs here");

    double fz_alpha = 0.4, fz_beta = 0.43;
    int fz_order = 10, fz_bins = 4096;
    std::string fz_form = "flat", fz_out;
    auto* freqz = app.add_subcommand("freqz", "comb-allpass frequency response CSV");
    freqz->add_option("--alpha", fz_alpha, "depth");
    freqz->add_option("--beta", fz_beta, "tilt");
    freqz->add_option("--order", fz_order, "filter order N");
    freqz->add_option("--form", fz_form, "flat|literal");
    freqz->add_option("--bins", fz_bins, "number of bins over [0, pi)");
    freqz->add_option("--out", fz_out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (process->parsed()) {
            if (seed_opt->count() > 0) popt.seed = seed_flag;
            return run_process(popt);
        }
        if (analyze->parsed()) return run_analyze(aopt);
        if (simulate->parsed()) {
            return run_simulate(sim_config, sim_report, sim_traces, sim_dump, true);
        }
        if (compare->parsed()) {
            return run_simulate(cmp_config, cmp_report, cmp_traces, cmp_dump, false);
        }
        if (freqz->parsed()) return run_freqz(fz_alpha, fz_beta, fz_order, fz_form, fz_bins, fz_out);
    } catch (const scald::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const scald::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const scald::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
