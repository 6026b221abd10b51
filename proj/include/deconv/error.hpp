#pragma once

#include <stdexcept>
#include <string>

namespace deconv {

// Base for failures the CLI maps to exit code 2 (bad input) or 3 (numerics).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or configuration violates a documented constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FrequencyOverflowError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonInvertibleDistortionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SymmetryViolationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateDistributionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace deconv
