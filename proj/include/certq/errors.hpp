#pragma once

#include <stdexcept>
#include <string>

namespace certq {

/// Base class for all certq errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A pivot of the Cholesky factorization was not strictly positive.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// The linear term of the scaled box QP is zero; callers must take the
/// box-center shortcut instead of scaling.
class ZeroGradient : public Error {
 public:
  explicit ZeroGradient(const std::string& msg) : Error(msg) {}
};

/// eps outside (0, 2n): the iteration-count formula is undefined.
class InvalidTolerance : public Error {
 public:
  explicit InvalidTolerance(const std::string& msg) : Error(msg) {}
};

/// Problem data violates the BoxQP contract (asymmetry, not SPD, bad bounds).
class InvalidProblem : public Error {
 public:
  explicit InvalidProblem(const std::string& msg) : Error(msg) {}
};

/// A full Newton step lost strict positivity or the Newton matrix lost
/// positive definiteness. Carries the 1-based iteration index (0 when the
/// index is not yet known).
class NumericalBreakdown : public Error {
 public:
  NumericalBreakdown(const std::string& msg, int iteration)
      : Error(iteration > 0 ? msg + " (iteration " + std::to_string(iteration) + ")" : msg),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Active-set enumeration requested beyond its 3^n budget.
class DimensionTooLarge : public Error {
 public:
  explicit DimensionTooLarge(const std::string& msg) : Error(msg) {}
};

class IterationLimit : public Error {
 public:
  explicit IterationLimit(const std::string& msg) : Error(msg) {}
};

}  // namespace certq
