#pragma once

#include <stdexcept>
#include <string>

namespace lamplight {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested object is larger than a configured enumeration or size cap.
struct CapExceeded : Error {
  using Error::Error;
};

// Malformed input document (missing fields, bad types, bad indices).
struct SchemaError : Error {
  using Error::Error;
};

// A transition row does not sum to one.
struct StochasticityError : Error {
  StochasticityError(const std::string& msg, int row, double row_sum)
      : Error(msg), row(row), row_sum(row_sum) {}
  int row;
  double row_sum;
};

// nu(x) p(x,y) != nu(y) p(y,x) somewhere; carries the worst offending pair.
struct ReversibilityError : Error {
  ReversibilityError(const std::string& msg, int x, int y, double violation)
      : Error(msg), x(x), y(y), violation(violation) {}
  int x, y;
  double violation;
};

struct EmptySubset : Error {
  using Error::Error;
};

struct FullSubset : Error {
  using Error::Error;
};

// Flip-rate model does not satisfy detailed balance against the lamp measure.
struct IncompatibleModel : Error {
  using Error::Error;
};

struct ZeroFunction : Error {
  using Error::Error;
};

// Dirichlet energy of the candidate is (numerically) zero: the function lies
// in the kernel, i.e. it is almost-surely constant.
struct DegenerateDirichlet : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct ConvergenceFailure : Error {
  ConvergenceFailure(const std::string& msg, double residual, int iterations)
      : Error(msg), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

// An optimizer result fell outside its analytic certificate bracket.
// This signals a bug in the optimizer, not bad input.
struct BracketViolation : Error {
  using Error::Error;
};

struct HypothesisViolated : Error {
  using Error::Error;
};

// Hamming-ball certificate: fewer than two admissible shells at this size.
struct InsufficientRadius : Error {
  InsufficientRadius(const std::string& msg, int max_admissible_delta)
      : Error(msg), max_admissible_delta(max_admissible_delta) {}
  int max_admissible_delta;
};

}  // namespace lamplight
