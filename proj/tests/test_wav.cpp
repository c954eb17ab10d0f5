#include "scald/wav.hpp"

#include "scald/errors.hpp"
#include "scald/rng.hpp"
#include "scald/signals.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace scald;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("scald_wav_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("float32 wav round trip is bit exact") {
    TempDir tmp;
    AudioBuffer buf = make_stereo(44100, white_noise(1000, 93, 0.5f), white_noise(1000, 94, 0.5f));
    const auto p = tmp.path / "f32.wav";
    write_wav(p, buf, WavFormat::float32);

    const auto back = read_wav(p);
    CHECK(back.format == WavFormat::float32);
    CHECK(back.audio.sample_rate == 44100);
    REQUIRE(back.audio.num_channels() == 2);
    CHECK(back.audio.channels == buf.channels);
}

TEST_CASE("pcm16 wav round trips within one lsb") {
    TempDir tmp;
    // in-range samples; values beyond full scale clip by design
    Rng rng(95);
    std::vector<float> samples(2000);
    for (auto& v : samples) v = static_cast<float>(rng.uniform(-0.999, 0.999));
    AudioBuffer buf = make_mono(16000, std::move(samples));
    const auto p = tmp.path / "pcm.wav";
    write_wav(p, buf, WavFormat::pcm16);

    const auto back = read_wav(p);
    CHECK(back.format == WavFormat::pcm16);
    REQUIRE(back.audio.num_frames() == buf.num_frames());
    for (std::size_t i = 0; i < buf.num_frames(); ++i) {
        CHECK(std::abs(back.audio.channels[0][i] - buf.channels[0][i]) <= 1.0f / 32768.0f);
    }

    // a second trip through pcm16 is lossless once quantized
    const auto p2 = tmp.path / "pcm2.wav";
    write_wav(p2, back.audio, WavFormat::pcm16);
    const auto back2 = read_wav(p2);
    CHECK(back2.audio.channels == back.audio.channels);
}

TEST_CASE("unknown chunks are skipped") {
    TempDir tmp;
    AudioBuffer buf = make_mono(8000, {0.5f, -0.5f, 0.25f, -0.25f});
    const auto p = tmp.path / "plain.wav";
    write_wav(p, buf, WavFormat::pcm16);

    // splice a LIST chunk between fmt and data
    std::ifstream in(p, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::vector<char> extra = {'L', 'I', 'S', 'T', 4, 0, 0, 0, 'I', 'N', 'F', 'O'};
    bytes.insert(bytes.begin() + 36, extra.begin(), extra.end());
    const std::uint32_t riff_size = static_cast<std::uint32_t>(bytes.size()) - 8;
    std::memcpy(bytes.data() + 4, &riff_size, 4);
    const auto p2 = tmp.path / "chunky.wav";
    std::ofstream(p2, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));

    const auto back = read_wav(p2);
    REQUIRE(back.audio.num_frames() == 4);
    CHECK(back.audio.channels[0][0] == doctest::Approx(0.5f).epsilon(1e-4));
}

TEST_CASE("reader rejects broken input") {
    TempDir tmp;
    CHECK_THROWS_AS(read_wav(tmp.path / "missing.wav"), IoError);

    const auto garbage = tmp.path / "garbage.wav";
    std::ofstream(garbage, std::ios::binary) << "this is not a wav file at all";
    CHECK_THROWS_AS(read_wav(garbage), IoError);
}

TEST_CASE("writer validates rate and shape") {
    TempDir tmp;
    AudioBuffer bad = make_mono(7999, {0.0f});
    CHECK_THROWS_AS(write_wav(tmp.path / "bad.wav", bad, WavFormat::pcm16), IoError);

    AudioBuffer ragged;
    ragged.sample_rate = 16000;
    ragged.channels = {{0.0f, 0.0f}, {0.0f}};
    CHECK_THROWS_AS(write_wav(tmp.path / "ragged.wav", ragged, WavFormat::pcm16), IoError);
}

TEST_CASE("failed writes do not leave partial output") {
    AudioBuffer buf = make_mono(16000, {0.1f, 0.2f});
    const std::filesystem::path p = "/nonexistent_dir_scald/out.wav";
    CHECK_THROWS_AS(write_wav(p, buf, WavFormat::pcm16), IoError);
    CHECK(!std::filesystem::exists(p));
}
