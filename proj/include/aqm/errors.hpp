#pragma once

#include <stdexcept>
#include <string>

namespace aqm {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or space mismatches, invalid subsystem indices.
struct DimensionError : Error {
  using Error::Error;
};

// Parameter values that violate an operation's preconditions
// (negative rates, broken resonance conditions, unknown channel tags, ...).
struct InvalidArgumentError : Error {
  using Error::Error;
};

// A numerical invariant failed at runtime: trace drift, loss of
// positivity, a failed audit. The CLI maps these to exit status 2.
struct InvariantError : Error {
  using Error::Error;
};

// Solver breakdowns: degenerate null spaces, non-convergence,
// integration steps too coarse in strict mode.
struct SolverError : Error {
  using Error::Error;
};

// Configuration-file syntax or validation problems. Exit status 1.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace aqm
