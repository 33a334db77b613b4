#pragma once

#include <stdexcept>
#include <string>

namespace dampsim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented invariant (negative rate, bad density, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NegativeTimeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Raised where a finite asymptote needs every mode to be damped.
class UndampedModeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidDensityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TailMassError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidLctError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NoCandidateError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario text.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dampsim
