#pragma once

#include <stdexcept>
#include <string>

namespace bcstreams {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data (bad record, bad file). Carries a line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Violated precondition or invariant on otherwise well-formed input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A measure that is mathematically undefined for the given input (e.g. zero entropy).
class UndefinedMeasureError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcstreams
