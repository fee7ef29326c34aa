#pragma once

#include <stdexcept>
#include <string>

// Exception taxonomy shared by all modules.  Every error carries a plain
// message; callers that need diagnostics (e.g. the RP violation search)
// put them in the message text.

namespace levyfields {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Combinatorial request exceeds the hard enumeration cap.
struct SizeError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation (e.g. kernel at x = 0).
struct DomainError : Error {
    using Error::Error;
};

// Two lattice fields with different grid specs were combined.
struct LatticeMismatch : Error {
    using Error::Error;
};

// A test function violates a required support constraint.
struct SupportError : Error {
    using Error::Error;
};

// Adaptive quadrature failed to reach the requested tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// Momentum argument inside the excluded band around the mass shell.
struct MassShellError : Error {
    using Error::Error;
};

// A requested lattice translation leaves the grid.
struct OffLattice : Error {
    using Error::Error;
};

// The constructive violation search exhausted its parameter budget.
struct SearchFailed : Error {
    using Error::Error;
};

// Experiment configuration failed validation; message names the field path.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace levyfields
