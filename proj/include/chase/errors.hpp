#pragma once

#include <stdexcept>
#include <string>

namespace chase {

// Invalid parameters, violated model assumptions, unsupported settings.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data: trace files, series, out-of-range slot values.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A schedule failed feasibility validation where feasibility is required.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chase
