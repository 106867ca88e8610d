#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ast {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An operation was invoked in a state that does not support it.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Particle weights sum to zero (or are not finite).
class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or does not follow its format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A text row failed to parse; carries the 1-based line number.
class ParseError : public FormatError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : FormatError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ast
