#pragma once

#include <stdexcept>
#include <string>

namespace mecb {

// CSV / input parsing failures. CLI maps this to exit code 1.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Infeasible budget or (k, b) configuration. CLI maps this to exit code 2.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter combinations (b out of range, k > n, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values where finite reals are required. CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mecb
