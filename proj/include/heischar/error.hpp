#pragma once

#include <stdexcept>
#include <string>

namespace heischar {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Points or vectors of different Heisenberg dimension were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the set where the operation is defined
/// (center of the group, outside a bounding box, nonpositive radius...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A profile, domain, or configuration failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a numerical procedure that could not finish.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace heischar
