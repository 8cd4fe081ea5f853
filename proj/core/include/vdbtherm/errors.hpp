#pragma once

#include <stdexcept>
#include <string>

namespace vdbtherm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class ZeroCouplingError : public Error {
 public:
  using Error::Error;
};

class PoleOnContourError : public Error {
 public:
  PoleOnContourError(const std::string& what, double energy)
      : Error(what), energy_(energy) {}
  double energy() const noexcept { return energy_; }

 private:
  double energy_;
};

class BranchError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Quadrature that ran out of refinement budget.  Carries what it had.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace vdbtherm
