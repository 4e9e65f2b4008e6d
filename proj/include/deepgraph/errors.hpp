#pragma once

#include <stdexcept>
#include <string>

namespace deepgraph {

// Bad user input: malformed config, invalid arguments, contract violations.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: non-convergence, NaN loss, singular systems.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent data files.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace deepgraph
