#pragma once

#include <stdexcept>
#include <string>

namespace cnp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel rule parameters or a custom coefficient list are unusable.
class InvalidKernel : public Error {
 public:
  using Error::Error;
};

/// A coefficient beyond the cached prefix was requested.
class InsufficientCache : public Error {
 public:
  using Error::Error;
};

/// A point lies on or outside the closed unit ball.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its hypotheses (non-pure tuple, m < 2, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The defect operator has rank zero, so the dilation lands in a zero space.
class DegenerateDilation : public Error {
 public:
  using Error::Error;
};

/// Singular values straddle the rank threshold; no silent rank decision is made.
class AmbiguousRank : public Error {
 public:
  using Error::Error;
};

/// A square root of a negative b-coefficient was required.
class NotCnp : public Error {
 public:
  using Error::Error;
};

/// A truncated series failed its convergence diagnostic.
class NotConverged : public Error {
 public:
  using Error::Error;
};

/// Two objects were built on different truncated bases.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration, tuple file or report.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cnp
