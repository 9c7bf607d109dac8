#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace holoscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (unparseable records, unknown ids,
/// violated preconditions on the data itself).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations. Carries the best residuals seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace holoscope
