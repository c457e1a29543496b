#pragma once

#include <stdexcept>
#include <string>

namespace matchkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric determinant fell below the declared margin (or the point left the
/// metric's valid region).
class SingularMetric : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A backward characteristic left the valid range before reaching the
/// initial surface.
class CharacteristicEscape : public Error {
 public:
  using Error::Error;
};

/// |det ĝ| too small to evaluate the closed-form cart control law.
class DegenerateModelMetric : public Error {
 public:
  using Error::Error;
};

class NotControllable : public Error {
 public:
  using Error::Error;
};

class ComplexPolesNotConjugate : public Error {
 public:
  using Error::Error;
};

class PastBlowup : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

}  // namespace matchkit
