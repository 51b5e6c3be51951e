#pragma once

#include <span>
#include <vector>

#include "fuelrod/conduction.hpp"
#include "fuelrod/core_model.hpp"

namespace fuelrod {

/// Pressures acting on the cladding tube [Pa], positive in compression.
struct MechanicsLoads {
  double gap_pressure = 15.51e6;
  double coolant_pressure = 15.51e6;

  void validate() const;
};

/// Elastic constants for one cylinder. Radial and hoop expansion share
/// alpha_hoop; alpha_axial drives the axial thermal strain.
struct CylinderElastic {
  double youngs;
  double poisson;
  double alpha_hoop;
  double alpha_axial;
};

struct SliceStress {
  std::vector<double> r;
  std::vector<double> sigma_r;      // [Pa]
  std::vector<double> sigma_theta;  // [Pa]
  std::vector<double> sigma_z;      // [Pa]
  std::vector<double> hoop_elastic; // [sigma_t - nu (sigma_r + sigma_z)] / E
};

/// Axisymmetric thermoelastic cylinder in generalized plane strain with
/// closed ends. `r_nodes` runs from the inner radius (0 for a solid rod)
/// to the outer radius and `temperature` is linear between nodes. The
/// stresses are evaluated at the radii in `at`.
SliceStress thermoelastic_cylinder(std::span<const double> r_nodes,
                                   std::span<const double> temperature, double p_inner,
                                   double p_outer, const CylinderElastic& c, double t_ref,
                                   std::span<const double> at);

/// Cladding annulus under gap pressure inside and coolant pressure outside,
/// evaluated at the nodes.
SliceStress lame_thermoelastic_slice(std::span<const double> r, std::span<const double> temperature,
                                     const MechanicsLoads& loads, const MaterialParams& m);

/// Solid pellet under gap pressure, evaluated at the nodes.
SliceStress fuel_thermoelastic_slice(std::span<const double> r,
                                     std::span<const double> temperature, double gap_pressure,
                                     const MaterialParams& m);

/// Per-node thermal strain: alpha_hoop (T - T_ref) in the cladding,
/// alpha_fuel (T - T_ref) in the pellet.
std::vector<double> thermal_expansion_strain(const TemperatureField& field,
                                             const MaterialParams& m);

double thermal_creep_increment(double sigma_theta, double temperature, double duration,
                               const MaterialParams& m);

struct StrainReport {
  double thermal = 0.0;
  double creep = 0.0;
  double elastic = 0.0;
  double irradiation_growth = 0.0;
  double total = 0.0;
  double r = 0.0;  // evaluation point [m]
  double z = 0.0;
  double clad_mean_temperature = 0.0;  // [K]
  double sigma_theta = 0.0;            // [Pa]
  double run_time = 0.0;               // [s]
};

/// Cladding hoop strain at the axial slice with the hottest cladding node:
/// thermal strain from the slice's area-mean temperature, elastic strain
/// and creep from the mid-wall hoop stress.
StrainReport hoop_strain_summary(const TemperatureField& field, const MaterialParams& m,
                                 double duration, const MechanicsLoads& loads = {});

/// Nodal stresses over the whole rod mesh. Fuel nodes come from the pellet
/// slices, cladding nodes from the cladding slices.
struct StressField {
  RodMesh mesh;
  std::vector<double> sigma_r;
  std::vector<double> sigma_z;
  std::vector<double> sigma_theta;
};

StressField stress_field(const TemperatureField& field, const MechanicsLoads& loads,
                         const MaterialParams& m);

}  // namespace fuelrod
