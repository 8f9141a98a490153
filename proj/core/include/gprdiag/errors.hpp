#pragma once

#include <stdexcept>
#include <string>

namespace gprdiag {

// Input data is malformed or unusable (non-finite samples, bad files,
// mismatched provenance). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine cannot produce a result (singular system, zero
// spectral radius). CLI maps this to exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Parameter violations are reported as std::invalid_argument (exit code 2).

} // namespace gprdiag
