#pragma once

#include <stdexcept>
#include <string>

namespace featent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument, malformed document, or data that violates a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Always a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace featent
