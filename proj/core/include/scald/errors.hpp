#pragma once

#include <stdexcept>
#include <string>

namespace scald {

// Invalid configuration or parameters that violate a documented invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// File and stream failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure at runtime (adaptive filter divergence, non-finite samples).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A callback broke its contract (e.g. a frame transform changed the frame length).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace scald
