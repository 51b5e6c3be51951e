#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuelrod {

enum class ErrorKind {
  Usage,
  Config,
  Io,
  Domain,
  CorrelationValidity,
  Simulation,
  Solver,
  Numerical,
  Training,
  Structural,
  Metric,
};

const char* to_string(ErrorKind kind);

// Process exit code used by the CLI for each error kind.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by iterative solvers that exhaust their iteration budget.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, std::vector<double> residuals)
      : Error(ErrorKind::Solver, message), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

// Coolant march left the property table; carries the offending elevation.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& message, double z)
      : Error(ErrorKind::Simulation, message), z_(z) {}

  double z() const { return z_; }

 private:
  double z_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& message, std::size_t batch)
      : Error(ErrorKind::Numerical, message), batch_(batch) {}

  std::size_t batch() const { return batch_; }

 private:
  std::size_t batch_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace fuelrod
