#pragma once

#include <stdexcept>
#include <string>

namespace quasifree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible sizes (covariances of different L, etc).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument violated a documented precondition.
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

/// A phase function whose stationary points could not be resolved at any
/// derivative order up to 2R+3.
class DegenerateStructure : public Error {
 public:
  using Error::Error;
};

/// Requested time lies outside the certified window [t0, tR].
class OutsideWindow : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An experiment finished but one of its physical post-conditions failed.
class PostConditionFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace quasifree
