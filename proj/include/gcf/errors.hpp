#pragma once

#include <stdexcept>
#include <string>

namespace gcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation argument violates a documented invariant.
/// The message names the violated invariant (e.g. "grid parity").
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Profile samples and grid disagree in length.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Newton iteration did not reach the residual tolerance within max_iter.
class NewtonDivergence : public Error {
 public:
  using Error::Error;
};

/// A node became non-finite during time stepping.
class StabilityViolation : public Error {
 public:
  using Error::Error;
};

/// A checker was invoked outside its domain of validity.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Mesh export hit a nonpositive radius.
class DegenerateSurface : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or trajectory document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcf
