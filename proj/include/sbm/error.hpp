#pragma once

#include <stdexcept>
#include <string>

namespace sbm {

/// Bad arguments or malformed input data. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for estimation and numerical failures (CLI exit code 3).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All sample values equal; the Frechet likelihood has no unique maximizer.
class DegenerateSampleError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// Root bracket exhausted or iteration budget spent.
class ConvergenceError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// Quadrature did not reach the requested accuracy.
class NumericalError : public EstimationError {
 public:
  NumericalError(const std::string& what, double error_estimate, int intervals)
      : EstimationError(what + " (error estimate " + std::to_string(error_estimate) +
                        ", " + std::to_string(intervals) + " subintervals)"),
        error_estimate_(error_estimate),
        intervals_(intervals) {}

  [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }
  [[nodiscard]] int intervals() const noexcept { return intervals_; }

 private:
  double error_estimate_;
  int intervals_;
};

}  // namespace sbm
