#pragma once

#include <stdexcept>
#include <string>

namespace effcon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form quantity is undefined for the given state (negative
/// radicand, massless particle at rest, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Neither root of the (Δp_t)² quadratic respects the semiclassical hierarchy.
class NoSemiclassicalRoot : public Error {
 public:
  using Error::Error;
};

class InvalidVelocity : public Error {
 public:
  using Error::Error;
};

/// A bracket residual is neither zero nor of order ħ².
class MalformedTable : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace effcon
