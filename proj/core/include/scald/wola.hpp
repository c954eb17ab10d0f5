#pragma once

#include "scald/window.hpp"

#include <functional>
#include <span>
#include <vector>

namespace scald {

// Per-window transform: receives one analysis-windowed frame, returns a frame
// of the same length. Must be causal within the frame; a stateful callable
// sees frames in stream order, one call per frame.
using FrameTransform = std::function<std::vector<double>(const std::vector<double>&)>;

// Weighted overlap-add host for per-window time-domain filtering.
//
// Frames of length L start at -L/2, 0, L/2, ... , n - L/2 and are zero-padded
// outside the input. Each frame is analysis-windowed, transformed, synthesis-
// windowed (same Vorbis window both times) and accumulated at its true stream
// position, so output sample n lines up with input sample n and an identity
// transform reconstructs the input exactly. Because the transform is causal
// within the frame, no sample of the output ever depends on input more than
// one hop ahead, which is what keeps the streaming delay at zero.
//
// Input length must be a multiple of the hop (ConfigError otherwise); a
// transform returning the wrong length raises ContractError.
std::vector<float> wola_process(const WindowSpec& spec, std::span<const float> input,
                                const FrameTransform& transform);

// Convenience identity-transform run (windowing round trip only).
std::vector<float> wola_identity(const WindowSpec& spec, std::span<const float> input);

} // namespace scald
