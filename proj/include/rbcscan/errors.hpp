#pragma once

#include <stdexcept>
#include <string>

namespace rbcscan {

// Base of every error the library throws. Each subclass maps to a CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

/// Malformed file, unknown field, wrong JSON type.
class SchemaError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

/// Value out of its mathematical domain (negative distance, point off-image...).
class DomainError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Parsed value violates a type invariant (score 1.5, rows*cols mismatch...).
class InvariantError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Inconsistent configuration, e.g. an output resolution with a different aspect ratio.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// API misuse: zero trials, empty threshold list, mixed image ids.
class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace rbcscan
