#ifndef PERCREG_ERRORS_HPP
#define PERCREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace percreg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid model parameter (e.g. querying a two-source field above q).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Request exceeds memory or enumeration budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A box or path escapes the window.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

// Input violates the hypotheses of the bypass construction; the sample is
// censored, not failed.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// An internal invariant of a construction broke although its hypotheses held.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace percreg

#endif  // PERCREG_ERRORS_HPP
