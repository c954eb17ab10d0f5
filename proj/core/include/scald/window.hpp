#pragma once

#include <vector>

namespace scald {

enum class WindowKind { vorbis };

// Analysis/synthesis window description. Hop is fixed at 50% overlap, which
// is what makes the Princen-Bradley identity w^2(n) + w^2(n + L/2) = 1 usable
// for perfect reconstruction with the window applied twice.
struct WindowSpec {
    int length = 1024;
    WindowKind kind = WindowKind::vorbis;

    int hop() const { return length / 2; }
};

// w(n) = sin(pi/2 * sin^2(pi (n + 0.5) / L)).
// Throws ConfigError for odd lengths or L < 4.
std::vector<double> make_window(const WindowSpec& spec);

} // namespace scald
