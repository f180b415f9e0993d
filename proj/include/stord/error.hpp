#pragma once

#include <stdexcept>
#include <string>

namespace stord {

// Base for every error raised by the library. The CLI maps these onto exit
// codes, so each category stays a distinct type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A required majorization premise does not hold.
class OrderError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter value (zero exponent, empty sample, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, failed convergence, vanishing derivatives.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A theorem was asked to run on hypotheses that did not pass.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Self-check failure; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace stord
