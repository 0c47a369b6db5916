#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppp {

// Base of every error thrown by the library. `kind()` is a stable,
// machine-parsable class name used by the CLI on its one-line error report.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class ArgumentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        detail_(what),
        line_(line),
        column_(column) {}

  const char* kind() const noexcept override { return "parse"; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  // Message without the position suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

// Gold and system trees (or trees and raw text) disagree on the token yield.
class YieldMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "yield-mismatch"; }
};

// Inconsistent shapes or contents of data handed between stages.
class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "convergence"; }
};

}  // namespace ppp
