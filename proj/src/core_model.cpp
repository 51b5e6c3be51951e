#include "fuelrod/core_model.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod {

namespace {

// Compressed water at 15.51 MPa, every 5 K. Generated once from IAPWS-IF97
// region 1 (density, c_p), the IAPWS 2008 viscosity and IAPWS 2011 thermal
// conductivity formulations (python `iapws` 1.5). Nodes above the 617.99 K
// saturation temperature are the metastable liquid continuation of region 1,
// so the single-phase channel march stays smooth up to 630 K.
// Pr is stored as mu * c_p / k from the same source values.
constexpr std::array<WaterTableNode, 15> kWaterTable{{
    {560.0, 752.0690081219656, 5185.050992950392, 9.374559354426691e-05, 0.5790617579222389, 0.8394194163944414},
    {565.0, 742.7076631748683, 5278.4416495474925, 9.175642577800374e-05, 0.5714456969185138, 0.8475537431674668},
    {570.0, 732.9300589428178, 5384.016123963605, 8.977798926560154e-05, 0.5634912403822941, 0.8578059553420848},
    {575.0, 722.6815121047706, 5504.532931014003, 8.780113893873767e-05, 0.5551675219606431, 0.8705557179605325},
    {580.0, 711.8936845305509, 5643.710694223812, 8.581547867482908e-05, 0.5464349596565821, 0.8863227474161747},
    {585.0, 700.4796629379665, 5806.680194667949, 8.380881642057646e-05, 0.5372421312105683, 0.9058317771008615},
    {590.0, 688.326818670361, 6000.712029685278, 8.176639796899607e-05, 0.5275212739708011, 0.9301171955081133},
    {595.0, 675.2860752272078, 6236.477464304889, 7.966977868735826e-05, 0.5171815338867, 0.960704794766929},
    {600.0, 661.1541746485436, 6530.546268365404, 7.749493369270136e-05, 0.5060976488618822, 0.9999735252321028},
    {605.0, 645.6387015380238, 6911.286500676509, 7.520832833261403e-05, 0.4940869778661483, 1.0520137701027525},
    {610.0, 628.274058187894, 7435.059247994917, 7.275701421914295e-05, 0.4808532353237558, 1.124985071718018},
    {615.0, 608.194796741004, 8234.42832900936, 7.00417669940795e-05, 0.4658352697089553, 1.2381070044573173},
    {620.0, 583.5191344524555, 9665.0457173694, 6.684691485147451e-05, 0.44780343856464216, 1.4427725034347558},
    {625.0, 549.8224645316665, 12749.904188137069, 6.268224480017444e-05, 0.423873868353738, 1.8854491280708583},
    {630.0, 497.3132266814656, 20497.190533325953, 5.655498724254768e-05, 0.38753287312482837, 2.9912774618913995},
}};

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  return os.str();
}

}  // namespace

void RodGeometry::validate() const {
  if (!(fuel_outer_radius > 0.0 && fuel_outer_radius < clad_inner_radius &&
        clad_inner_radius < clad_outer_radius)) {
    fail(ErrorKind::Config, "geometry: require 0 < R_fo < R_ci < R_co");
  }
  if (!(fuel_length > 0.0 && fuel_length <= rod_length)) {
    fail(ErrorKind::Config, "geometry: require 0 < L_f <= L_fr");
  }
  if (!(fuel_bottom >= 0.0 && fuel_bottom <= rod_length - fuel_length + 1e-12)) {
    fail(ErrorKind::Config, "geometry: require 0 <= z_pb <= L_fr - L_f");
  }
}

void MaterialParams::validate() const {
  for (double t : {300.0, 2500.0}) {
    if (!(fuel_k_a + fuel_k_b * t > 0.0)) {
      fail(ErrorKind::Config, "materials: fuel conductivity must stay positive over 300-2500 K");
    }
    if (!(clad_k_a + clad_k_b * t > 0.0)) {
      fail(ErrorKind::Config, "materials: cladding conductivity must stay positive over 300-2500 K");
    }
  }
  if (fuel_k_burnup < 0.0) {
    fail(ErrorKind::Config, "materials: burnup degradation coefficient must be >= 0");
  }
  if (!(clad_poisson > 0.0 && clad_poisson < 0.5) ||
      !(fuel_poisson > 0.0 && fuel_poisson < 0.5)) {
    fail(ErrorKind::Config, "materials: Poisson ratio must lie in (0, 0.5)");
  }
  if (!(gap_conductance > 0.0)) {
    fail(ErrorKind::Config, "materials: gap conductance must be positive");
  }
  if (!(clad_youngs > 0.0 && fuel_youngs > 0.0)) {
    fail(ErrorKind::Config, "materials: Young's modulus must be positive");
  }
  if (creep_coefficient < 0.0 || creep_exponent <= 0.0) {
    fail(ErrorKind::Config, "materials: invalid creep constants");
  }
}

double ChannelBoundary::heated_perimeter(const RodGeometry& geom) const {
  return 2.0 * kPi * geom.clad_outer_radius;
}

void ChannelBoundary::validate(const RodGeometry& geom) const {
  if (!(inlet_temperature > 273.15)) {
    fail(ErrorKind::Config, describe("channel: T_in must exceed 273.15 K", inlet_temperature));
  }
  if (!(outlet_pressure > 0.0)) fail(ErrorKind::Config, "channel: P_out must be positive");
  if (!(mass_flux > 0.0)) fail(ErrorKind::Config, "channel: mass flux must be positive");
  const double area = pitch * pitch - kPi * geom.clad_outer_radius * geom.clad_outer_radius;
  if (!(area > 0.0)) fail(ErrorKind::Config, "channel: pitch too small for the rod");
  const double dh = 4.0 * area / heated_perimeter(geom);
  if (std::abs(flow_area - area) > 1e-9 * area ||
      std::abs(hydraulic_diameter - dh) > 1e-9 * dh) {
    fail(ErrorKind::Config, "channel: flow area / hydraulic diameter inconsistent with pitch and R_co");
  }
}

ChannelBoundary make_channel_boundary(double inlet_temperature,
                                      double outlet_pressure, double mass_flux,
                                      double pitch, const RodGeometry& geom) {
  ChannelBoundary bc;
  bc.inlet_temperature = inlet_temperature;
  bc.outlet_pressure = outlet_pressure;
  bc.mass_flux = mass_flux;
  bc.pitch = pitch;
  bc.flow_area = pitch * pitch - kPi * geom.clad_outer_radius * geom.clad_outer_radius;
  bc.hydraulic_diameter = 4.0 * bc.flow_area / bc.heated_perimeter(geom);
  return bc;
}

double HeatSource::extrapolated_length(const RodGeometry& geom) const {
  return geom.fuel_length + 2.0 * extrapolation_length;
}

void HeatSource::validate() const {
  if (!(peak_linear_rate >= 0.0)) fail(ErrorKind::Config, "source: q'_0 must be >= 0");
  if (!(extrapolation_length >= 0.0)) fail(ErrorKind::Config, "source: delta_e must be >= 0");
}

double linear_heat_rate(double z, const HeatSource& src, const RodGeometry& geom) {
  if (!(z >= 0.0 && z <= geom.rod_length)) {
    fail(ErrorKind::Domain, describe("linear_heat_rate: z outside the rod", z));
  }
  if (z < geom.fuel_bottom || z > geom.fuel_top()) return 0.0;
  const double le = src.extrapolated_length(geom);
  const double q = src.peak_linear_rate *
                   std::sin(kPi * (z - geom.fuel_bottom + src.extrapolation_length) / le);
  return q > 0.0 ? q : 0.0;
}

double total_rod_power(const HeatSource& src, const RodGeometry& geom) {
  const double le = src.extrapolated_length(geom);
  const double d = src.extrapolation_length;
  return src.peak_linear_rate * (le / kPi) *
         (std::cos(kPi * d / le) - std::cos(kPi * (d + geom.fuel_length) / le));
}

double fuel_conductivity(double temperature, double burnup, const MaterialParams& m) {
  if (!(temperature >= 300.0 && temperature <= 3000.0)) {
    fail(ErrorKind::Domain, describe("fuel_conductivity: T outside 300-3000 K", temperature));
  }
  if (!(burnup >= 0.0)) {
    fail(ErrorKind::Domain, describe("fuel_conductivity: negative burnup", burnup));
  }
  return 1.0 / (m.fuel_k_a + m.fuel_k_b * temperature) / (1.0 + m.fuel_k_burnup * burnup);
}

double clad_conductivity(double temperature, const MaterialParams& m) {
  if (!(temperature >= 300.0 && temperature <= 1500.0)) {
    fail(ErrorKind::Domain, describe("clad_conductivity: T outside 300-1500 K", temperature));
  }
  return m.clad_k_a + m.clad_k_b * temperature;
}

std::span<const WaterTableNode> water_table() { return kWaterTable; }

WaterProps water_properties(double temperature, double pressure) {
  if (!(pressure > 0.0)) fail(ErrorKind::Domain, "water_properties: pressure must be positive");
  if (!(temperature >= kWaterTableMin && temperature <= kWaterTableMax)) {
    fail(ErrorKind::Domain,
         describe("water_properties: T outside the 560-630 K table", temperature));
  }
  constexpr double step = 5.0;
  auto i = static_cast<std::size_t>((temperature - kWaterTableMin) / step);
  if (i >= kWaterTable.size() - 1) i = kWaterTable.size() - 2;
  const auto& lo = kWaterTable[i];
  const auto& hi = kWaterTable[i + 1];
  const double t = (temperature - lo.temperature) / step;
  if (t == 0.0) {
    return {lo.density, lo.specific_heat, lo.viscosity, lo.conductivity, lo.prandtl};
  }
  if (t == 1.0) {
    return {hi.density, hi.specific_heat, hi.viscosity, hi.conductivity, hi.prandtl};
  }
  auto lerp = [t](double a, double b) { return a + t * (b - a); };
  WaterProps p;
  p.density = lerp(lo.density, hi.density);
  p.specific_heat = lerp(lo.specific_heat, hi.specific_heat);
  p.viscosity = lerp(lo.viscosity, hi.viscosity);
  p.conductivity = lerp(lo.conductivity, hi.conductivity);
  p.prandtl = p.viscosity * p.specific_heat / p.conductivity;
  return p;
}

}  // namespace fuelrod
