#pragma once

#include <stdexcept>
#include <string>

namespace obstacle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (argument out of range).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The origin is not inside the domain, or the domain parameters are unusable.
class InvalidDomainError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class DegenerateNormalError : public Error {
 public:
  using Error::Error;
};

/// The matching function has no sign change: the solution never leaves the
/// obstacle inside the domain (or the obstacle is never positive).
class NoDetachmentError : public Error {
 public:
  using Error::Error;
};

class InvalidMatchingError : public Error {
 public:
  using Error::Error;
};

/// More than one contact radius solves the matching equation.
class AmbiguousMatchingError : public Error {
 public:
  using Error::Error;
};

/// The exterior two-phase problem has no decaying solution (N = 2).
class NonexistenceError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the interval on which a radial solution is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The grid spacing does not resolve the domain.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A modelling hypothesis (obstacle support inside the domain, containment of
/// the inclusion, positivity of the obstacle) fails for the requested run.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

}  // namespace obstacle
