#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coex {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidCollisionProbability : public Error {
 public:
  explicit InvalidCollisionProbability(double p);
  double probability() const noexcept { return p_; }

 private:
  double p_;
};

/// Numerical solver did not converge or produced a degenerate result.
/// Carries the last iterate so callers can inspect how far it got.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::vector<double> last_iterate,
                double residual, long iterations);
  const std::vector<double>& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> last_;
  double residual_;
  long iterations_;
};

class UndefinedFairness : public Error {
 public:
  UndefinedFairness() : Error("fairness undefined: both inputs are zero") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, long episode = -1)
      : Error(what), episode_(episode) {}
  long episode() const noexcept { return episode_; }

 private:
  long episode_;
};

class InsufficientData : public Error {
 public:
  InsufficientData(std::size_t have, std::size_t need);
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Every violated invariant is listed, not only the first one found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace coex
