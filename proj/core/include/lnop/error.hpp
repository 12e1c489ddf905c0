#pragma once

#include <stdexcept>
#include <string>

namespace lnop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents disagree with what an operation requires.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an API call was violated (e.g. backward on a non-scalar).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Requested spectral mode counts exceed what the grid can represent.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Resampling between grids that are not integer multiples of each other.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A PDE solver failed (step underflow, non-convergence, blow-up).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf produced or consumed where finite values are required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or mismatched on-disk container.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lnop
