#pragma once

#include <stdexcept>
#include <string>

namespace stableform {

// Base for all library errors so the CLI can map them to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: family constraint violated, parameter out of range, ...
struct InvalidParam : Error {
    using Error::Error;
};

// exp(-V) has infinite mass (detected numerically).
struct NonIntegrable : Error {
    using Error::Error;
};

// A quadrature failed to converge within its budget.
struct QuadDiverged : Error {
    using Error::Error;
};

// A rate engine's precondition fails (Phi bounded, (EF) fails, ...).
struct CriterionInapplicable : Error {
    using Error::Error;
};

// exp(-V) failed the bounded-C^2 probes required by the generator.
struct SmoothnessViolation : Error {
    using Error::Error;
};

// Eigensolver did not converge.
struct SolverFailure : Error {
    using Error::Error;
};

// Cell-pair integration failed its tolerance checks during assembly.
struct GridTooCoarse : Error {
    using Error::Error;
};

// compare() got curves with non-overlapping r-windows.
struct DisjointWindows : Error {
    using Error::Error;
};

// Config file / CLI flag validation failure.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace stableform
