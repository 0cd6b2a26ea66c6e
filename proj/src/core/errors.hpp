#pragma once

#include <stdexcept>
#include <string>

namespace distex {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgumentError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Solver failures: singular systems, non-convergence and the like.
struct NumericalError : Error {
  using Error::Error;
};

// A method that is structurally undefined for the given model,
// e.g. input gradients of a k-nearest-neighbor vote.
struct InapplicableError : Error {
  using Error::Error;
};

}  // namespace distex
