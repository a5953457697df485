#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hiacc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector's length does not match the problem dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared where the algorithm requires finite state.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The requested combination of noise family and batch size has no tail
/// formula; the library refuses rather than inventing one.
class UnsupportedCombination : public Error {
 public:
  using Error::Error;
};

/// A schedule or batch size cannot be planned within the configured caps.
class InfeasibleSchedule : public Error {
 public:
  using Error::Error;
};

/// An algorithm made more oracle queries than its declared budget.
class BudgetViolation : public Error {
 public:
  using Error::Error;
};

/// Aggregated validation failures, one message per offending field path.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace hiacc
