#pragma once

#include <stdexcept>
#include <string>

namespace pulsesync {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or configuration (bad grid, malformed file, unknown key).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: the computation ran but did not produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public NumericalError {
 public:
  BlowUpError(long step, double time)
      : NumericalError("non-finite field values at step " + std::to_string(step) +
                       " (t = " + std::to_string(time) + ")"),
        step_(step),
        time_(time) {}
  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

class NoPulseError : public NumericalError {
 public:
  NoPulseError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DegeneratePulseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IllConditionedNullspaceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OffManifoldError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LeftBasinError : public NumericalError {
 public:
  LeftBasinError(const std::string& what, double tube_distance)
      : NumericalError(what), tube_distance_(tube_distance) {}
  double tube_distance() const noexcept { return tube_distance_; }

 private:
  double tube_distance_;
};

class DegenerateGeneratorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PositivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pulsesync
