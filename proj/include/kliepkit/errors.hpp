#pragma once

#include <stdexcept>
#include <string>

namespace kliepkit {

// Shape mismatch between inputs (wrong column count, incompatible lengths).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A sample matrix with zero rows where at least one observation is required.
struct EmptySampleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values or a computation that lost numerical meaning.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative routine failed to reach its stopping rule within its budget,
// or produced an internally inconsistent answer.  `detail` carries solver
// diagnostics (iterations, residuals) for error reporting.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what, std::string detail = {})
        : std::runtime_error(what), detail(std::move(detail)) {}
    std::string detail;
};

// A matrix required to be positive definite was not.  Carries a lower-bound
// estimate of the offending minimum eigenvalue when one is available.
struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string& what,
                                 double min_eigenvalue_estimate = 0.0)
        : std::runtime_error(what),
          min_eigenvalue_estimate(min_eigenvalue_estimate) {}
    double min_eigenvalue_estimate;
};

// A statistic map or routine was asked for a dimension it does not support.
struct UnsupportedDimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem read/write failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kliepkit
