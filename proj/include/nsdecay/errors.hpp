#pragma once

#include <stdexcept>
#include <string>

namespace nsdecay {

/// Raised when an operation is called outside its domain (bad sizes, t < 0, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A K-family multiplier was requested outside the oscillatory regime r < r*.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested L2 norm is infinite because of a 1/|xi| singularity at xi = 0.
class DivergentAtOrigin : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature failed its self-convergence gate; carries the last two refinement values.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double previous, double last)
      : std::runtime_error(what), previous_(previous), last_(last) {}

  double previous() const { return previous_; }
  double last() const { return last_; }

 private:
  double previous_;
  double last_;
};

}  // namespace nsdecay
