#pragma once

#include <stdexcept>
#include <string>

namespace fcascade {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures: the CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SpectraOverlap : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepRejected : public NumericalError {
 public:
  StepRejected(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class HorizonExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonPositiveTrace : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Contract violations on inputs.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonzeroS : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// Configuration problems; `where` carries the line or field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace fcascade
