#pragma once

#include <stdexcept>
#include <string>

namespace iccool {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Trap or crystal configuration outside its stability region.
struct StabilityError : Error {
    explicit StabilityError(const std::string& msg) : Error(msg) {}
};

// Config-file or input-file problems (bad key, unparseable value, missing file).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Numerical failures: truncation leakage, norm drift, non-convergence.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

} // namespace iccool
