#pragma once

#include <stdexcept>
#include <string>

namespace stiff {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a kernel or parameter set.
struct DomainError : Error {
  using Error::Error;
};

// Pointwise evaluation at a kernel singularity.
struct SingularityError : Error {
  using Error::Error;
};

// Grid invariants, grid mismatch between operands, undersized grids.
struct GridError : Error {
  using Error::Error;
};

// Layer thickness not on a grid line.
struct AlignmentError : Error {
  using Error::Error;
};

struct SolverError : Error {
  SolverError(const std::string& what, double residual_norm)
      : Error(what + " (residual " + std::to_string(residual_norm) + ")"),
        residual(residual_norm) {}
  double residual;
};

struct PhaseError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace stiff
