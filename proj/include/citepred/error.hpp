#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citepred {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or inputs that violate an operation's preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read back into a valid in-memory structure.
class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  /// 1-based line of the offending record, 0 when not line-oriented.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A metric whose value is mathematically undefined for the given input.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Generator or embedding service failure. `retryable()` is true for
/// connection problems, 5xx and rate limiting.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0, bool retryable = true)
      : Error(what), status_(status), retryable_(retryable) {}

  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

/// Model output that contains no recoverable JSON.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// Model output that is JSON but does not carry the expected fields.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace citepred
