#pragma once

#include <stdexcept>

namespace wrisk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw observations contain NaN or infinity.
class NonFiniteInputError : public Error {
 public:
  using Error::Error;
};

/// Root isolation could not separate sign changes: the separation bound
/// underflowed and recursive subdivision hit its depth limit without
/// resolving an interval. Signals (near-)multiple roots.
class DegenerateSeparationError : public Error {
 public:
  using Error::Error;
};

/// Every coefficient of a derived polynomial trimmed to zero.
class ZeroPolynomialError : public Error {
 public:
  using Error::Error;
};

/// Requested lattice exceeds the exhaustive-search guard.
class GridGuardExceededError : public Error {
 public:
  using Error::Error;
};

/// A configuration or simulator spec failed validation; the message names
/// the offending field.
class SpecValidationError : public Error {
 public:
  using Error::Error;
};

/// Damped fixed-point iteration failed to converge.
class FixedPointDivergenceError : public Error {
 public:
  using Error::Error;
};

/// Too many consecutive singular draws while fitting a transfer matrix.
class SingularEmbeddingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wrisk
