#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Bad argument to a library call (zero-norm polarization, malformed grid, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Run configuration rejected by a validation gate. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: quadrature that does not converge, leap-frog blow-up,
/// spectral aliasing. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate = 0.0)
      : std::runtime_error(what), estimate_(estimate) {}
  /// Best value (or deviation) reached before giving up.
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

}  // namespace dirac
