#pragma once

#include <stdexcept>
#include <string>

namespace gridcast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required column is missing or column sets do not match.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Tensor dimensions are inconsistent with the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A loss, gradient or parameter became NaN or infinite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A column had no valid values, so gaps cannot be filled.
class UnfillableColumnError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or incompatible file.
class LoadError : public Error {
 public:
  using Error::Error;
};

class ConfigMismatchError : public LoadError {
 public:
  using LoadError::LoadError;
};

/// Ensemble members do not score the same target timestamps.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridcast
