#pragma once

#include <stdexcept>
#include <string>

namespace ddm {

// Argument outside the mathematical domain of an operation (e.g. m > S).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A problem size exceeds what a solver supports.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Adaptive integration could not make progress; carries the last time
// that was reached with an accepted step.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

// The trace-constrained steady-state system is singular, i.e. the
// Liouvillian kernel is not one-dimensional.
class DegenerateSteadyState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// <S+S-> vanishes, so a normalized correlation is undefined.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_rel_error)
      : std::runtime_error(what), achieved_(achieved_rel_error) {}
  double achieved_rel_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fewer distinct features in the data than free parameters.
class UnderdeterminedFit : public FitError {
 public:
  using FitError::FitError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddm
