#pragma once

#include <stdexcept>

namespace spreach {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values or a violated call contract.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A model or config violates one of its declared invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input is not in the expected format (magic, version, schema).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input parses as the right format but the payload is truncated or
// internally inconsistent.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// A configured resource cap would be exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace spreach
