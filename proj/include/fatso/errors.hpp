#pragma once

#include <stdexcept>
#include <string>

namespace fatso {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied parameter (m <= 1, lambda <= 0, bad grid, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Problem with the data itself: unreadable file, bad cell, zero-variance
// column, rank-deficient design.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite objective or similar breakdown inside a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fatso
