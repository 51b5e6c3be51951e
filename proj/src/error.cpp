#include "fuelrod/error.hpp"

namespace fuelrod {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::CorrelationValidity: return "correlation_validity";
    case ErrorKind::Simulation: return "simulation";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Training: return "training";
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Metric: return "undefined_metric";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Config: return 3;
    case ErrorKind::Io: return 4;
    case ErrorKind::Domain:
    case ErrorKind::CorrelationValidity: return 5;
    case ErrorKind::Simulation:
    case ErrorKind::Solver: return 6;
    case ErrorKind::Numerical:
    case ErrorKind::Training: return 7;
    case ErrorKind::Metric: return 8;
    case ErrorKind::Structural: return 9;
  }
  return 1;
}

}  // namespace fuelrod
