#include "scald/analysis.hpp"

#include "scald/errors.hpp"
#include "scald/fft.hpp"
#include "scald/signals.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace scald;

TEST_CASE("identical channels give unit coherence") {
    const auto x = white_noise(44100, 51, 0.5f);
    const auto spec = coherence(x, x, 1024, 20, 44100);
    for (double g : spec.gamma_sq) CHECK(g == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coherence is invariant to a fixed linear filter") {
    const auto x = white_noise(44100 * 20, 52, 0.5f);
    std::vector<float> h = {1.0f, 0.5f, 0.25f};
    auto y = convolve(x, h);
    y.resize(x.size());
    const int fft_size = 8192;
    const int blocks = static_cast<int>(x.size() / (fft_size / 2)) - 1;
    const auto spec = coherence(x, y, fft_size, blocks, 44100);
    // skip DC and Nyquist, where the windowed estimate has no averaging gain
    for (std::size_t k = 1; k + 1 < spec.gamma_sq.size(); ++k) {
        CHECK(std::abs(spec.gamma_sq[k] - 1.0) < 1e-6);
    }
}

TEST_CASE("independent noise averages to the estimator bias") {
    const auto a = white_noise(44100 * 5, 53, 0.5f);
    const auto b = white_noise(44100 * 5, 54, 0.5f);
    const auto spec = coherence(a, b, 1024, 100, 44100);
    double mean = 0.0;
    for (double g : spec.gamma_sq) mean += g;
    mean /= static_cast<double>(spec.gamma_sq.size());
    CHECK(mean < 0.05);
    CHECK(mean > 0.0);
}

TEST_CASE("coherence is scale invariant") {
    const auto x = white_noise(44100, 55, 0.5f);
    const auto y = white_noise(44100, 56, 0.5f);
    const auto base = coherence(x, y, 1024, 30, 44100);

    // power-of-two gains commute exactly with the float pipeline
    auto x4 = x;
    auto yq = y;
    for (auto& v : x4) v *= 4.0f;
    for (auto& v : yq) v *= 0.25f;
    const auto scaled = coherence(x4, yq, 1024, 30, 44100);
    CHECK(base.gamma_sq == scaled.gamma_sq);
}

TEST_CASE("coherence bounds stay in [0, 1]") {
    const auto a = pink_noise(44100 * 2, 57, 0.3f);
    const auto b = speech_like(44100 * 2, 44100, 58);
    const auto spec = coherence(a, b, 2048, 40, 44100);
    for (double g : spec.gamma_sq) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 + 1e-12);
    }
}

TEST_CASE("coherence input validation") {
    const auto x = white_noise(4096, 59, 0.5f);
    CHECK_THROWS_AS(coherence(x, x, 1024, 1, 44100), ConfigError);  // single block
    CHECK_THROWS_AS(coherence(x, x, 1024, 100, 44100), ConfigError); // insufficient data
    CHECK_THROWS_AS(coherence(x, x, 1000, 4, 44100), ConfigError);  // not a power of two
    const auto y = white_noise(2048, 60, 0.5f);
    CHECK_THROWS_AS(coherence(x, y, 1024, 2, 44100), ConfigError); // length mismatch
}

TEST_CASE("band averaging") {
    CoherenceSpectrum spec;
    spec.fft_size = 1024;
    spec.n_blocks = 10;
    spec.sample_rate = 44100;
    spec.gamma_sq.assign(513, 1.0);

    SUBCASE("all-ones spectrum averages to one") {
        CHECK(band_average(spec, 0.0, 22050.0) == doctest::Approx(1.0));
    }

    SUBCASE("step spectrum averages to one half over the full band") {
        for (std::size_t k = 0; k < spec.gamma_sq.size(); ++k) {
            spec.gamma_sq[k] = spec.bin_hz(static_cast<int>(k)) < 11025.0 ? 1.0 : 0.0;
        }
        CHECK(band_average(spec, 0.0, 22050.0) == doctest::Approx(0.5).epsilon(0.01));
    }

    SUBCASE("empty band is an error") {
        CHECK_THROWS_AS(band_average(spec, 1000.0, 1000.0), ConfigError);
        CHECK_THROWS_AS(band_average(spec, 2000.0, 1000.0), ConfigError);
        CHECK_THROWS_AS(band_average(spec, 0.0, 30000.0), ConfigError);
    }
}

TEST_CASE("misalignment in dB") {
    std::vector<double> h = {1.0, -0.5, 0.25, 0.0, 0.125};

    SUBCASE("exact estimate hits the floor") {
        CHECK(misalignment_db(h, h) == doctest::Approx(-200.0));
    }

    SUBCASE("zero estimate is 0 dB") {
        std::vector<double> zero(h.size(), 0.0);
        CHECK(misalignment_db(h, zero) == doctest::Approx(0.0));
    }

    SUBCASE("half-amplitude estimate is about -6.02 dB") {
        auto half = h;
        for (auto& v : half) v *= 0.5;
        CHECK(misalignment_db(h, half) == doctest::Approx(-6.020599913279624).epsilon(1e-9));
    }

    SUBCASE("zero reference is an error") {
        std::vector<double> zero(4, 0.0);
        CHECK_THROWS_AS(misalignment_db(zero, h), ConfigError);
    }

    SUBCASE("shorter estimate is zero-padded") {
        std::vector<double> est = {1.0, -0.5};
        const double expect =
            10.0 * std::log10((0.25 * 0.25 + 0.125 * 0.125) / (1.0 + 0.25 + 0.0625 + 0.015625));
        CHECK(misalignment_db(h, est) == doctest::Approx(expect).epsilon(1e-9));
    }

    SUBCASE("interpolating toward the truth decreases monotonically") {
        std::vector<double> est(h.size());
        double prev = 1.0;
        for (int step = 0; step <= 10; ++step) {
            const double t = step / 10.0;
            for (std::size_t i = 0; i < h.size(); ++i) est[i] = t * h[i];
            const double eta = misalignment_db(h, est);
            if (step > 0) CHECK(eta < prev);
            prev = eta;
        }
    }
}

TEST_CASE("csv emitters produce plot-ready rows") {
    CoherenceSpectrum spec;
    spec.fft_size = 8;
    spec.n_blocks = 2;
    spec.sample_rate = 8000;
    spec.gamma_sq = {1.0, 0.5, 0.25, 0.125, 0.0};
    std::ostringstream os;
    write_coherence_csv(os, spec);
    CHECK(os.str().substr(0, 21) == "frequency_hz,gamma_sq");
    CHECK(os.str().find("1000,0.5") != std::string::npos);

    MisalignmentTrace trace;
    trace.time_s = {0.5, 1.0};
    trace.eta_db = {-3.0, -12.5};
    std::ostringstream os2;
    write_trace_csv(os2, trace);
    CHECK(os2.str().find("time_s,eta_db") == 0);
    CHECK(os2.str().find("1,-12.5") != std::string::npos);
}
