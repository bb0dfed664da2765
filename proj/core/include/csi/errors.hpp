#pragma once

#include <stdexcept>
#include <string>

namespace csi {

/// Base for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A SwarmConfig, ExperimentSpec or binding violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An author tried to write into a room it does not belong to.
class AuthorizationError : public Error {
 public:
  using Error::Error;
};

class SessionClosedError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: empty text, invalid UTF-8, unknown room, bad option id.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Statistical test on a sample with zero variance.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

class PersistError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace csi
