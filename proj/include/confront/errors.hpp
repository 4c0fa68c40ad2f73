#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace confront {

/// Invalid user input: bad flags, malformed config files, precondition
/// violations on constructor arguments. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, singular systems, bracket failures.
/// Carries the iteration count and the last residual where meaningful.
/// Maps to CLI exit code 1.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, long iterations = -1,
                         double residual = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), iterations(iterations), residual(residual) {}

    long iterations;
    double residual;
};

/// A scalar bisection could not bracket its target. The endpoint values are
/// kept as a diagnostic (e.g. "a too small" in the slab speed search).
class BracketError : public SolverError {
public:
    BracketError(const std::string& what, double lo, double value_lo, double hi, double value_hi)
        : SolverError(what), lo(lo), hi(hi), value_lo(value_lo), value_hi(value_hi) {}

    double lo, hi;
    double value_lo, value_hi;
};

}  // namespace confront
