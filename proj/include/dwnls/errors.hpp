#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dwnls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Raised when two fields live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// An internal identity that must hold exactly (up to rounding) was violated.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to reach its tolerance. Carries the best residuals.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> residuals)
      : Error(what), best_residuals(std::move(residuals)) {}
  std::vector<double> best_residuals;
};

/// Time integration produced non-finite values or runaway energy-norm growth.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t) : Error(what), time_reached(t) {}
  double time_reached;
};

}  // namespace dwnls
