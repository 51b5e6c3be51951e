#pragma once

#include <vector>

#include "fuelrod/channel.hpp"
#include "fuelrod/core_model.hpp"
#include "fuelrod/mesh.hpp"

namespace fuelrod {

struct TemperatureField {
  RodMesh mesh;
  std::vector<double> temperature;  // one value per mesh node [K]
};

/// Volumetric heating per fuel node, q''' = q'(z) / (pi R_fo^2).
struct VolumetricSource {
  std::vector<double> power_density;  // [W/m^3], fuel nodes only

  static VolumetricSource from_heat_source(const RodMesh& mesh, const HeatSource& src,
                                           const RodGeometry& geom);
  /// Radially and axially uniform source carrying `linear_rate` [W/m].
  static VolumetricSource uniform(const RodMesh& mesh, double linear_rate,
                                  double fuel_outer_radius);
};

struct ConductionOptions {
  double picard_tolerance = 0.01;  // max |dT| [K]
  int max_picard_iterations = 200;
};

struct ConductionResult {
  TemperatureField field;
  int iterations = 0;
  std::vector<double> residuals;  // max |dT| per Picard sweep
};

/// Steady RZ conduction, div(k grad T) + q''' = 0, vertex-centred finite
/// volumes. Centerline and axial ends are adiabatic, the pellet and cladding
/// exchange heat through the gap conductance, and the cladding outer
/// surface sees h(z) (T - T_cool(z)) from `coolant`.
ConductionResult assemble_and_solve_conduction(const RodMesh& mesh, const MaterialParams& m,
                                               const VolumetricSource& src,
                                               const ChannelState& coolant, double burnup,
                                               const ConductionOptions& options = {});

/// q''(z) = h(z) (T(R_co, z) - T_cool(z)) on the cladding axial nodes.
std::vector<double> wall_heat_flux(const TemperatureField& field, const ChannelState& coolant);

/// Linear interpolation of a nodal profile; clamps to the end values.
double interpolate(std::span<const double> x, std::span<const double> y, double at);

}  // namespace fuelrod
