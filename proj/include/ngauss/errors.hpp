#pragma once

#include <stdexcept>
#include <string>

namespace ngauss {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: empty mode sets, bad shapes, non-symmetric inputs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operands built for different mode configurations.
class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

/// Hilbert-space dimension above the configured limit.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Not a density matrix (negative eigenvalues, bad trace, bad distribution).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Fock cutoff too small for the requested state.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (e.g. pure
/// references for a logarithm, ν below the uncertainty bound).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace ngauss
