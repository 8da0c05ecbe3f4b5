#pragma once

#include <stdexcept>
#include <string>

namespace fsplay {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: empty inputs, mismatched grids, q <= 1, ...
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A point or time lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied field returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// The explicit integrator needed a step below min_step.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

/// A trajectory left the working box.
class BoxEscapeError : public Error {
 public:
  using Error::Error;
};

/// An operation needs data the system does not provide (e.g. jacobians).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Preconditions of the patched-linearization scheme are not met.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// b + c == 0 in the forced oscillator; the closed form does not apply.
class BorderlineError : public Error {
 public:
  using Error::Error;
};

/// b + c >= 0 in the forced oscillator; solutions are not bounded.
class BoundednessError : public Error {
 public:
  using Error::Error;
};

/// The requested collar leaves no separated points inside the box.
class CollarTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Internal numerical failure (matrix functions, root brackets).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsplay
