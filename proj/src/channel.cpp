#include "fuelrod/channel.hpp"

#include <cmath>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod {

double dittus_boelter_htc(const WaterProps& props, double mass_flux,
                          double hydraulic_diameter) {
  const double re = mass_flux * hydraulic_diameter / props.viscosity;
  if (!(re > 1.0e4)) {
    std::ostringstream os;
    os << "dittus_boelter_htc: Re = " << re << " is below the turbulent limit 1e4";
    fail(ErrorKind::CorrelationValidity, os.str());
  }
  if (!(props.prandtl > 0.6 && props.prandtl < 160.0)) {
    std::ostringstream os;
    os << "dittus_boelter_htc: Pr = " << props.prandtl << " outside (0.6, 160)";
    fail(ErrorKind::CorrelationValidity, os.str());
  }
  return 0.023 * std::pow(re, 0.8) * std::pow(props.prandtl, 0.4) * props.conductivity /
         hydraulic_diameter;
}

// Bare rod bundle (H/D -> infinity), interior subchannel, turbulent:
//   C_fT = a + b1 (P/D - 1) + b2 (P/D - 1)^2
double cheng_todreas_coefficient(double pitch_to_diameter) {
  if (!(pitch_to_diameter > 1.0 && pitch_to_diameter <= 1.5)) {
    std::ostringstream os;
    os << "cheng_todreas: P/D = " << pitch_to_diameter << " outside (1.0, 1.5]";
    fail(ErrorKind::CorrelationValidity, os.str());
  }
  const double x = pitch_to_diameter - 1.0;
  if (pitch_to_diameter <= 1.1) return 0.09378 + 1.398 * x - 8.664 * x * x;
  return 0.1458 + 0.03632 * x - 0.03333 * x * x;
}

double cheng_todreas_friction(double reynolds, double pitch_to_diameter) {
  if (!(reynolds > 1.0e4)) {
    std::ostringstream os;
    os << "cheng_todreas: Re = " << reynolds << " is not turbulent";
    fail(ErrorKind::CorrelationValidity, os.str());
  }
  return cheng_todreas_coefficient(pitch_to_diameter) / std::pow(reynolds, 0.18);
}

namespace {

WaterProps props_at(double t, double p, double z) {
  if (!(t >= kWaterTableMin && t <= kWaterTableMax)) {
    std::ostringstream os;
    os << "coolant temperature " << t << " K at z = " << z << " m leaves the property table";
    throw SimulationError(os.str(), z);
  }
  return water_properties(t, p);
}

void fill_hydraulics(ChannelState& s, const ChannelBoundary& bc, const RodGeometry& geom) {
  const std::size_t n = s.z.size();
  const double pd = bc.pitch / (2.0 * geom.clad_outer_radius);
  s.htc.resize(n);
  s.velocity.resize(n);
  s.reynolds.resize(n);
  s.prandtl.resize(n);
  s.pressure.assign(n, bc.outlet_pressure);
  std::vector<WaterProps> props(n);
  for (std::size_t k = 0; k < n; ++k) {
    props[k] = props_at(s.temperature[k], bc.outlet_pressure, s.z[k]);
    s.htc[k] = dittus_boelter_htc(props[k], bc.mass_flux, bc.hydraulic_diameter);
    s.velocity[k] = bc.mass_flux / props[k].density;
    s.reynolds[k] = bc.mass_flux * bc.hydraulic_diameter / props[k].viscosity;
    s.prandtl[k] = props[k].prandtl;
  }
  // Friction plus elevation head, integrated downstream to upstream.
  for (std::size_t k = n - 1; k-- > 0;) {
    const double dz = s.z[k + 1] - s.z[k];
    const double rho = 0.5 * (props[k].density + props[k + 1].density);
    const double re = 0.5 * (s.reynolds[k] + s.reynolds[k + 1]);
    const double f = cheng_todreas_friction(re, pd);
    const double dpdz = f / bc.hydraulic_diameter * bc.mass_flux * bc.mass_flux / (2.0 * rho) +
                        rho * kGravity;
    s.pressure[k] = s.pressure[k + 1] + dpdz * dz;
  }
}

void check_nodes(std::span<const double> z, const RodGeometry& geom) {
  if (z.size() < 2) fail(ErrorKind::Config, "solve_channel: need at least 2 axial nodes");
  for (std::size_t k = 1; k < z.size(); ++k) {
    if (!(z[k] > z[k - 1])) fail(ErrorKind::Config, "solve_channel: axial nodes not increasing");
  }
  if (std::abs(z.front()) > 1e-12 || std::abs(z.back() - geom.rod_length) > 1e-9) {
    fail(ErrorKind::Config, "solve_channel: axial nodes must span [0, L_fr]");
  }
}

}  // namespace

ChannelState solve_channel(std::span<const double> z, std::span<const double> wall_flux,
                           const ChannelBoundary& bc, const RodGeometry& geom) {
  bc.validate(geom);
  check_nodes(z, geom);
  if (wall_flux.size() != z.size()) {
    fail(ErrorKind::Config, "solve_channel: wall flux must be given on every axial node");
  }
  ChannelState s;
  s.z.assign(z.begin(), z.end());
  s.temperature.resize(z.size());
  s.temperature[0] = bc.inlet_temperature;
  const double mdot = bc.mass_flux * bc.flow_area;
  const double perimeter = bc.heated_perimeter(geom);
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    // Q_wall per unit length is q'' times the heated perimeter.
    const double q = 0.5 * (wall_flux[k] + wall_flux[k + 1]) * perimeter * (z[k + 1] - z[k]);
    const double t0 = s.temperature[k];
    const double cp0 = props_at(t0, bc.outlet_pressure, z[k]).specific_heat;
    const double predictor = t0 + q / (mdot * cp0);
    const double tmid = 0.5 * (t0 + predictor);
    const double cp = props_at(tmid, bc.outlet_pressure, 0.5 * (z[k] + z[k + 1])).specific_heat;
    s.temperature[k + 1] = t0 + q / (mdot * cp);
  }
  fill_hydraulics(s, bc, geom);
  return s;
}

ChannelState channel_from_temperature(std::span<const double> z,
                                      std::span<const double> temperature,
                                      const ChannelBoundary& bc, const RodGeometry& geom) {
  bc.validate(geom);
  check_nodes(z, geom);
  if (temperature.size() != z.size()) {
    fail(ErrorKind::Config, "channel_from_temperature: profile length mismatch");
  }
  ChannelState s;
  s.z.assign(z.begin(), z.end());
  s.temperature.assign(temperature.begin(), temperature.end());
  fill_hydraulics(s, bc, geom);
  return s;
}

ChannelState isothermal_channel(std::span<const double> z, const ChannelBoundary& bc,
                                const RodGeometry& geom) {
  std::vector<double> zero(z.size(), 0.0);
  return solve_channel(z, zero, bc, geom);
}

}  // namespace fuelrod
