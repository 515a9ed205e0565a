#pragma once

#include <stdexcept>
#include <string>

namespace edg {

// Base class for all solver errors. The CLI maps each subclass to a
// distinct nonzero exit status (documented in --help).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad command line / config file / argument values.
struct UsageError : SolverError {
  using SolverError::SolverError;
};

// Quadrature exactness beyond the supported range.
struct UnsupportedDegreeError : SolverError {
  using SolverError::SolverError;
};

// A problem specification violating the standing assumptions
// (homogeneous adjoint boundary data, sign condition on div(beta), ...).
struct InvalidProblemError : SolverError {
  using SolverError::SolverError;
};

// Stabilization condition tau1 - beta.n/2 > 0 failed at a face.
struct StabilizationError : SolverError {
  int face;
  StabilizationError(int face_, const std::string& msg)
      : SolverError(msg), face(face_) {}
};

// Sparse factorization failed or produced an unacceptable residual.
struct FactorizationError : SolverError {
  using SolverError::SolverError;
};

// A per-element block in the static condensation was singular.
struct CondensationError : SolverError {
  int element;
  CondensationError(int element_, const std::string& msg)
      : SolverError(msg), element(element_) {}
};

// Two solution objects that cannot be compared fieldwise.
struct InvalidComparisonError : SolverError {
  using SolverError::SolverError;
};

// File output failure.
struct IoError : SolverError {
  using SolverError::SolverError;
};

} // namespace edg
