#pragma once

#include <stdexcept>
#include <string>

namespace ghflow {

// Error taxonomy mirrors the CLI exit codes: configuration/domain problems
// exit 2, failed assertions exit 1, anything else exits 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument values (nonpositive radii, out-of-range indices, ...).
struct DomainError : Error {
  using Error::Error;
};

// API misuse (mismatched space references, incompatible grids).
struct UsageError : Error {
  using Error::Error;
};

// A monitor was asked to certify a statement whose hypothesis fails on the
// given data; the statement is not wrong, it just does not apply.
struct HypothesisError : Error {
  using Error::Error;
};

// Time integration left its admissible region (positivity loss, blow-up).
struct FlowError : Error {
  using Error::Error;
};

// Config file / schema problems.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ghflow
