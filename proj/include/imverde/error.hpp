#pragma once

#include <stdexcept>
#include <string>

namespace imverde {

/// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Arguments or data violating a documented contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Not enough nodes (or labeled nodes) to satisfy a requested size.
class SizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Degenerate input for a numerical routine (H(v) = 0, single-class metrics, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf produced during optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File-system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace imverde
