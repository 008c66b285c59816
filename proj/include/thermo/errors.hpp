#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

// Base of every error raised by the library. Each subclass names one failure
// mode of a specific operation so callers (and the CLI exit-code mapping) can
// dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

// Numerical failures. The CLI maps everything below to exit status 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GramNotSPD : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UndefinedEntry : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularShift : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientBranch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IncompatibleData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonPositiveEnergy : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolveFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace thermo
