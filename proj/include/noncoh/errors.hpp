#pragma once

#include <stdexcept>
#include <string>

namespace noncoh {

// Base for every error raised by the library. Callers that only care about
// "something numerical went wrong" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

// a2 in {0, 1} or x2 == 0: the input has a single mass point.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class CaseMismatch : public Error {
 public:
  using Error::Error;
};

class NearSingularAlpha : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

class MissingPowerBudget : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Internal cross-check failed (e.g. a conditional entropy clearly below zero).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace noncoh
