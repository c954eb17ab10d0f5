#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scald {

// Planar multichannel sample block. Float32 is the interchange format;
// filters run double internally and cast back at the edges.
struct AudioBuffer {
    int sample_rate = 0;
    std::vector<std::vector<float>> channels;

    AudioBuffer() = default;
    AudioBuffer(int rate, int num_channels, std::size_t num_frames)
        : sample_rate(rate), channels(num_channels, std::vector<float>(num_frames, 0.0f)) {}

    int num_channels() const { return static_cast<int>(channels.size()); }
    std::size_t num_frames() const { return channels.empty() ? 0 : channels[0].size(); }

    std::span<const float> channel(int c) const { return channels[static_cast<std::size_t>(c)]; }
    std::span<float> channel(int c) { return channels[static_cast<std::size_t>(c)]; }
};

inline AudioBuffer make_mono(int rate, std::vector<float> samples) {
    AudioBuffer b;
    b.sample_rate = rate;
    b.channels.push_back(std::move(samples));
    return b;
}

inline AudioBuffer make_stereo(int rate, std::vector<float> left, std::vector<float> right) {
    AudioBuffer b;
    b.sample_rate = rate;
    b.channels.push_back(std::move(left));
    b.channels.push_back(std::move(right));
    return b;
}

} // namespace scald
