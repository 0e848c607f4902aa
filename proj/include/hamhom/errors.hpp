#pragma once

#include <stdexcept>
#include <string>

namespace hamhom {

// Raised for malformed specs, configs, out-of-domain arguments. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an iteration diverges or fails to converge. Maps to CLI exit code 2.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by interpolation queries outside the tabulated hull.
class RangeError : public std::runtime_error {
public:
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hamhom
