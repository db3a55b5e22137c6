#pragma once

#include <stdexcept>
#include <string>

namespace pjn {

// Base class for every error the library reports to callers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cube or translate leaves the time-extended domain [0,1)^{n-1} x [0,3).
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

// Bisection requested below the grid resolution.
class RefinementBelowGrid : public Error {
 public:
  using Error::Error;
};

// Malformed grid file or header; the message names the offending field.
class FormatError : public Error {
 public:
  using Error::Error;
};

class NegativeInput : public Error {
 public:
  using Error::Error;
};

class InvalidExponent : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace pjn
