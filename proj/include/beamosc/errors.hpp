#pragma once

#include <stdexcept>
#include <string>

namespace beamosc {

// Raised for malformed or out-of-range configuration; the CLI maps this to exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation leaves its domain of validity (divergence, closed
// channel, truncation, non-convergence); the CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace beamosc
