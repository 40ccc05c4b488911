// errors.hpp — Error types shared across the metrology and fitting layers

#pragma once

#include <stdexcept>
#include <string>

namespace zenometry {

// Raised when 2 t gamma(t) = 1 (or its GHZ variant) has no root in the scan
// window — e.g. noiseless dynamics, where delta_omega(t) decreases forever.
struct NoOptimumError : std::runtime_error {
    explicit NoOptimumError(double bound)
        : std::runtime_error("no optimal measurement time in (0, " + std::to_string(bound) +
                             "] ms"),
          scan_bound(bound) {}
    double scan_bound;
};

struct DegenerateFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace zenometry
