#pragma once

#include <optional>
#include <span>

#include "fuelrod/conduction.hpp"

namespace fuelrod {

/// 1 - sum (p - t)^2 / sum (t - mean t)^2. Throws Metric for a constant truth.
double r_squared(std::span<const double> predicted, std::span<const double> truth);

/// ||p - t||_2 / ||t||_2. Throws Metric for a zero truth vector.
double nl2_norm(std::span<const double> predicted, std::span<const double> truth);

struct RegionMetrics {
  std::size_t count = 0;
  std::optional<double> r_squared;  // empty when the region's truth is constant
  double nl2 = 0.0;
  double max_abs_error = 0.0;  // [K]
  double max_rel_error = 0.0;
};

struct MetricsReport {
  double r_squared = 0.0;
  double nl2 = 0.0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  RegionMetrics fuel;
  RegionMetrics cladding;
};

/// Compares two fields on the same mesh; Config on a node mismatch.
MetricsReport compare_fields(const TemperatureField& predicted, const TemperatureField& truth);

}  // namespace fuelrod
