#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed configuration, inconsistent dimensions, invalid
/// parameters. The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during evaluation (non-finite samples, lattice too small,
/// quadrature that cannot reach its budget). The CLI maps these to exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Raised by text parsers; carries the byte offset of the offending token.
class ParseError : public ConfigError {
 public:
  ParseError(std::size_t position, const std::string& expected, const std::string& found)
      : ConfigError("parse error at position " + std::to_string(position) + ": expected " +
                    expected + ", found " + (found.empty() ? "end of input" : "'" + found + "'")),
        position_(position),
        expected_(expected) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

/// The integrand t^e f(sqrt t) would be unbounded near a coordinate hyperplane.
class UnboundedProfile : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A symbolic index-set operation would exceed its product-term budget.
class SymbolicBudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace rt
