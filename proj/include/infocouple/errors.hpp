#pragma once

#include <stdexcept>
#include <string>

namespace infocouple {

// Base of every error raised by the toolkit. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed probability data: negative mass, bad normalization, ragged tables.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (negative rate, p outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Conditioning on a zero-mass symbol.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

class PerturbationError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// Encoder and decoder disagree on the shared code marginal.
class CompositionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Misuse of an environment or coding protocol (stepping a terminal state,
// parties whose beliefs have diverged).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace infocouple
