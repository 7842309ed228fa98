#pragma once

#include <stdexcept>
#include <string>

namespace slowent {

/// Base class for every error raised by the library. The CLI maps all of
/// these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two words (or a word and a sample) disagree in length.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// A numeric argument lies outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An input is too large (or too small) for the requested algorithm.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Not enough rows/columns to compute a statistic.
class InsufficientData : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Malformed experiment configuration.
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace slowent
