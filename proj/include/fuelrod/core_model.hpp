#pragma once

#include <span>

namespace fuelrod {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.80665;

/// Full-length PWR rod dimensions. z = 0 sits at the cladding bottom.
struct RodGeometry {
  double rod_length = 3.876;             // L_fr [m]
  double fuel_length = 3.658;            // L_f [m]
  double fuel_outer_radius = 0.004096;   // R_fo [m]
  double clad_inner_radius = 0.0041786;  // R_ci [m]
  double clad_outer_radius = 0.0047506;  // R_co [m]
  double fuel_bottom = 0.03;             // z_pb [m]

  double fuel_top() const { return fuel_bottom + fuel_length; }

  /// Throws ErrorKind::Config when radii or lengths are inconsistent.
  void validate() const;
};

/// Simplified UO2 / Zircaloy-4 property set.
///
/// Fuel conductivity is k = 1 / (A + B T) / (1 + c_bu Bu); cladding
/// conductivity is linear in temperature. Thermal creep follows a single
/// Norton law  rate = A_c |sigma|^n exp(-Q/(R T)).
struct MaterialParams {
  double fuel_k_a = 0.0452;        // A [m K / W]
  double fuel_k_b = 2.46e-4;       // B [m / W]
  double fuel_k_burnup = 0.01;     // c_bu [1 / (MWd/kgU)]
  double clad_k_a = 12.6;          // [W / m K]
  double clad_k_b = 0.0118;        // [W / m K^2]
  double fuel_alpha = 1.0e-5;      // [1/K], isotropic
  double clad_alpha_hoop = 6.7e-6; // [1/K]
  double clad_alpha_axial = 4.4e-6;
  double clad_youngs = 7.8e10;     // [Pa]
  double clad_poisson = 0.37;
  double fuel_youngs = 2.0e11;
  double fuel_poisson = 0.316;
  double gap_conductance = 5000.0;  // [W / m^2 K]
  double creep_coefficient = 2.6e-9;     // A_c [1 / (s Pa^n)]
  double creep_exponent = 1.0;           // n
  double creep_activation = 15000.0;     // Q/R [K]
  double reference_temperature = 295.15; // [K]

  void validate() const;
};

/// Coolant subchannel inlet/outlet conditions plus the derived flow geometry.
struct ChannelBoundary {
  double inlet_temperature = 583.15;  // [K]
  double outlet_pressure = 15.51e6;   // [Pa]
  double mass_flux = 3244.04;         // [kg / s m^2]
  double pitch = 0.0126;              // [m]
  double flow_area = 0.0;             // [m^2] per rod
  double hydraulic_diameter = 0.0;    // [m]

  double heated_perimeter(const RodGeometry& geom) const;
  void validate(const RodGeometry& geom) const;
};

/// Fills flow_area = pitch^2 - pi R_co^2 and D_h = 4 A / (2 pi R_co).
ChannelBoundary make_channel_boundary(double inlet_temperature,
                                      double outlet_pressure, double mass_flux,
                                      double pitch, const RodGeometry& geom);

struct HeatSource {
  double peak_linear_rate = 20.0e3;   // q'_0 [W/m]
  double extrapolation_length = 0.08; // delta_e [m]

  /// L_e = L_f + 2 delta_e.
  double extrapolated_length(const RodGeometry& geom) const;
  void validate() const;
};

struct WaterProps {
  double density;         // [kg/m^3]
  double specific_heat;   // [J/kg K]
  double viscosity;       // [Pa s]
  double conductivity;    // [W/m K]
  double prandtl;
};

double linear_heat_rate(double z, const HeatSource& src,
                        const RodGeometry& geom);

/// Closed-form integral of linear_heat_rate over the fuel span [W].
double total_rod_power(const HeatSource& src, const RodGeometry& geom);

double fuel_conductivity(double temperature, double burnup,
                         const MaterialParams& m);

double clad_conductivity(double temperature, const MaterialParams& m);

/// Subcooled water at 15.51 MPa, linearly interpolated in temperature.
/// The pressure argument must be positive; the table has no pressure
/// dependence.
WaterProps water_properties(double temperature, double pressure);

struct WaterTableNode {
  double temperature;
  double density;
  double specific_heat;
  double viscosity;
  double conductivity;
  double prandtl;
};

std::span<const WaterTableNode> water_table();

inline constexpr double kWaterTablePressure = 15.51e6;
inline constexpr double kWaterTableMin = 560.0;
inline constexpr double kWaterTableMax = 630.0;

}  // namespace fuelrod
