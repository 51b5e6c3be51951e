#pragma once

#include <span>
#include <vector>

#include "fuelrod/core_model.hpp"

namespace fuelrod {

/// Steady single-phase coolant state on the channel's axial nodes.
struct ChannelState {
  std::vector<double> z;
  std::vector<double> temperature;   // T_cool [K]
  std::vector<double> htc;           // h [W/m^2 K]
  std::vector<double> pressure;      // P [Pa]
  std::vector<double> velocity;      // U [m/s]
  std::vector<double> reynolds;
  std::vector<double> prandtl;

  std::size_t size() const { return z.size(); }
  double outlet_temperature() const { return temperature.back(); }
};

/// h = 0.023 Re^0.8 Pr^0.4 k / D_h. Throws CorrelationValidity outside
/// Re > 1e4, 0.6 < Pr < 160.
double dittus_boelter_htc(const WaterProps& props, double mass_flux,
                          double hydraulic_diameter);

/// Coefficient C_fT of the Cheng-Todreas bare-rod correlation for an
/// interior subchannel in turbulent flow.
double cheng_todreas_coefficient(double pitch_to_diameter);

/// f = C_fT / Re^0.18 (Darcy). Turbulent (Re > 1e4), 1.0 < P/D <= 1.5.
double cheng_todreas_friction(double reynolds, double pitch_to_diameter);

/// Marches energy upward from T_in and pressure downward from P_out.
///
/// `wall_flux` is q''(z) [W/m^2] on the nodes `z`, which must span the rod
/// bottom to top. Throws SimulationError when the coolant leaves the
/// property table.
ChannelState solve_channel(std::span<const double> z, std::span<const double> wall_flux,
                           const ChannelBoundary& bc, const RodGeometry& geom);

/// Rebuilds h, U, Re, Pr and P for a prescribed temperature profile.
ChannelState channel_from_temperature(std::span<const double> z,
                                      std::span<const double> temperature,
                                      const ChannelBoundary& bc, const RodGeometry& geom);

/// Coolant state for a rod that has not yet delivered any heat.
ChannelState isothermal_channel(std::span<const double> z, const ChannelBoundary& bc,
                                const RodGeometry& geom);

}  // namespace fuelrod
