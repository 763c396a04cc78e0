#pragma once

#include <stdexcept>
#include <string>

namespace pk {

/// A linear solve hit a pivot below the singularity threshold.
struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The Riccati iteration failed to produce a stabilizing solution.
struct NotStabilizable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A physical constant or matrix entry violates its domain.
struct InvalidParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A training quantity exceeded the configured divergence guard.
struct DivergenceDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration parsing or validation failure.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pk
