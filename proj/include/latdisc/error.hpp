#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latdisc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or parameter-domain violation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An exact routine was asked to run past its size cap.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// An object violates a structural invariant (not Latin, doubled pair, ...).
class InvalidObject : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line` is 1-based, 0 when not attributable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace latdisc
