#include "fuelrod/thermomech.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod {

namespace {

// Running integrals of f(r) r dr over a piecewise-linear nodal profile.
class RadialIntegral {
 public:
  RadialIntegral(std::span<const double> r, std::span<const double> f) : r_(r), f_(f) {
    cumulative_.assign(r.size(), 0.0);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      cumulative_[i + 1] = cumulative_[i] + partial(i, r[i + 1]);
    }
  }

  // integral from r_.front() to x
  double operator()(double x) const {
    if (x <= r_.front()) return 0.0;
    if (x >= r_.back()) return cumulative_.back();
    const auto it = std::upper_bound(r_.begin(), r_.end(), x);
    const auto i = static_cast<std::size_t>(it - r_.begin()) - 1;
    return cumulative_[i] + partial(i, x);
  }

  double value(double x) const {
    if (x <= r_.front()) return f_.front();
    if (x >= r_.back()) return f_.back();
    const auto it = std::upper_bound(r_.begin(), r_.end(), x);
    const auto i = static_cast<std::size_t>(it - r_.begin()) - 1;
    const double s = (x - r_[i]) / (r_[i + 1] - r_[i]);
    return f_[i] + s * (f_[i + 1] - f_[i]);
  }

  double total() const { return cumulative_.back(); }

 private:
  // integral of (f_i + k (x - r_i)) x dx from r_i to x
  double partial(std::size_t i, double x) const {
    const double r0 = r_[i];
    const double k = (f_[i + 1] - f_[i]) / (r_[i + 1] - r_[i]);
    const double sq = 0.5 * (x * x - r0 * r0);
    return f_[i] * sq + k * ((x * x * x - r0 * r0 * r0) / 3.0 - r0 * sq);
  }

  std::span<const double> r_;
  std::span<const double> f_;
  std::vector<double> cumulative_;
};

void check_profile(std::span<const double> r, std::span<const double> t, const char* who) {
  if (r.size() < 2 || r.size() != t.size()) {
    std::ostringstream os;
    os << who << ": need matching radius and temperature profiles of at least 2 nodes";
    fail(ErrorKind::Config, os.str());
  }
  if (!(r.front() >= 0.0)) fail(ErrorKind::Config, std::string(who) + ": negative radius");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) {
      fail(ErrorKind::Config, std::string(who) + ": degenerate or unordered radii");
    }
  }
}

CylinderElastic clad_elastic(const MaterialParams& m) {
  return {m.clad_youngs, m.clad_poisson, m.clad_alpha_hoop, m.clad_alpha_axial};
}

CylinderElastic fuel_elastic(const MaterialParams& m) {
  return {m.fuel_youngs, m.fuel_poisson, m.fuel_alpha, m.fuel_alpha};
}

std::vector<double> slice_of(const TemperatureField& f, Region region, std::size_t iz) {
  const auto& mesh = f.mesh;
  const bool fuel = region == Region::Fuel;
  const std::size_t nr = fuel ? mesh.fuel_r().size() : mesh.clad_r().size();
  std::vector<double> t(nr);
  for (std::size_t ir = 0; ir < nr; ++ir) {
    t[ir] = f.temperature[fuel ? mesh.fuel_node(iz, ir) : mesh.clad_node(iz, ir)];
  }
  return t;
}

}  // namespace

void MechanicsLoads::validate() const {
  if (!std::isfinite(gap_pressure) || !std::isfinite(coolant_pressure) || gap_pressure < 0.0 ||
      coolant_pressure < 0.0) {
    fail(ErrorKind::Config, "mechanics loads: pressures must be finite and non-negative");
  }
}

SliceStress thermoelastic_cylinder(std::span<const double> r_nodes,
                                   std::span<const double> temperature, double p_inner,
                                   double p_outer, const CylinderElastic& c, double t_ref,
                                   std::span<const double> at) {
  check_profile(r_nodes, temperature, "thermoelastic_cylinder");
  if (!(c.youngs > 0.0) || !(c.poisson > -1.0 && c.poisson < 0.5)) {
    fail(ErrorKind::Config, "thermoelastic_cylinder: invalid elastic constants");
  }
  const double a = r_nodes.front();
  const double b = r_nodes.back();
  const bool solid = a == 0.0;
  const double nu = c.poisson;
  const double coef = c.youngs * (c.alpha_hoop + nu * c.alpha_axial) / (1.0 - nu * nu);

  std::vector<double> dt(temperature.size());
  for (std::size_t i = 0; i < dt.size(); ++i) dt[i] = temperature[i] - t_ref;
  const RadialIntegral integral(r_nodes, dt);
  const double ib = integral.total();
  const double area = b * b - a * a;
  const double dt_mean = 2.0 * ib / area;

  // Lame pressure solution; closed ends carry the end load as uniform sigma_z.
  const double pa = solid ? 0.0 : p_inner;
  const double lame_a = (pa * a * a - p_outer * b * b) / area;
  const double lame_b = (pa - p_outer) * a * a * b * b / area;

  SliceStress s;
  s.r.assign(at.begin(), at.end());
  const std::size_t n = at.size();
  s.sigma_r.resize(n);
  s.sigma_theta.resize(n);
  s.sigma_z.resize(n);
  s.hoop_elastic.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = at[k];
    if (r < a - 1e-12 || r > b + 1e-12) {
      fail(ErrorKind::Domain, "thermoelastic_cylinder: evaluation radius outside the wall");
    }
    const double d = integral.value(r);
    // I(r) / r^2 tends to dT(0) / 2 on the axis of a solid rod.
    const double ir_r2 = r > 0.0 ? integral(r) / (r * r) : 0.5 * d;
    const double a2_r2 = r > 0.0 ? a * a / (r * r) : 0.0;
    const double sr_th = coef * ((1.0 - a2_r2) * ib / area - ir_r2);
    const double st_th = coef * ((1.0 + a2_r2) * ib / area + ir_r2 - d);
    const double sz_th = c.youngs * c.alpha_axial * (dt_mean - d) + nu * (sr_th + st_th);
    const double inv_r2 = r > 0.0 ? 1.0 / (r * r) : 0.0;
    s.sigma_r[k] = sr_th + lame_a - lame_b * inv_r2;
    s.sigma_theta[k] = st_th + lame_a + lame_b * inv_r2;
    s.sigma_z[k] = sz_th + lame_a;
    s.hoop_elastic[k] =
        (s.sigma_theta[k] - nu * (s.sigma_r[k] + s.sigma_z[k])) / c.youngs;
  }
  return s;
}

SliceStress lame_thermoelastic_slice(std::span<const double> r, std::span<const double> temperature,
                                     const MechanicsLoads& loads, const MaterialParams& m) {
  loads.validate();
  if (r.size() < 2 || !(r.front() > 0.0) || !(r.front() < r.back())) {
    fail(ErrorKind::Config, "lame_thermoelastic_slice: degenerate cladding annulus");
  }
  return thermoelastic_cylinder(r, temperature, loads.gap_pressure, loads.coolant_pressure,
                                clad_elastic(m), m.reference_temperature, r);
}

SliceStress fuel_thermoelastic_slice(std::span<const double> r,
                                     std::span<const double> temperature, double gap_pressure,
                                     const MaterialParams& m) {
  if (r.size() < 2 || r.front() != 0.0) {
    fail(ErrorKind::Config, "fuel_thermoelastic_slice: pellet profile must start on the axis");
  }
  return thermoelastic_cylinder(r, temperature, 0.0, gap_pressure, fuel_elastic(m),
                                m.reference_temperature, r);
}

std::vector<double> thermal_expansion_strain(const TemperatureField& field,
                                             const MaterialParams& m) {
  std::vector<double> eps(field.temperature.size());
  const double floor = m.reference_temperature - 50.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double t = field.temperature[i];
    if (!(t >= floor)) {
      std::ostringstream os;
      os << "thermal_expansion_strain: T = " << t << " K is more than 50 K below T_ref";
      fail(ErrorKind::Domain, os.str());
    }
    const double alpha =
        field.mesh.node_region(i) == Region::Fuel ? m.fuel_alpha : m.clad_alpha_hoop;
    eps[i] = alpha * (t - m.reference_temperature);
  }
  return eps;
}

double thermal_creep_increment(double sigma_theta, double temperature, double duration,
                               const MaterialParams& m) {
  if (!(duration >= 0.0)) fail(ErrorKind::Domain, "thermal_creep_increment: negative duration");
  if (!(temperature > 0.0)) fail(ErrorKind::Domain, "thermal_creep_increment: T must be > 0 K");
  if (sigma_theta == 0.0 || duration == 0.0) return 0.0;
  const double magnitude = m.creep_coefficient * std::pow(std::abs(sigma_theta), m.creep_exponent) *
                           std::exp(-m.creep_activation / temperature) * duration;
  return std::copysign(magnitude, sigma_theta);
}

StrainReport hoop_strain_summary(const TemperatureField& field, const MaterialParams& m,
                                 double duration, const MechanicsLoads& loads) {
  const auto start = std::chrono::steady_clock::now();
  const auto& mesh = field.mesh;
  if (mesh.clad_node_count() == 0 || field.temperature.size() != mesh.node_count()) {
    fail(ErrorKind::Config, "hoop_strain_summary: field does not match its mesh");
  }
  const auto r = mesh.clad_r();
  std::size_t hot = 0;
  double t_hot = -1.0;
  for (std::size_t iz = 0; iz < mesh.clad_z().size(); ++iz) {
    for (std::size_t ir = 0; ir < r.size(); ++ir) {
      const double t = field.temperature[mesh.clad_node(iz, ir)];
      if (t > t_hot) {
        t_hot = t;
        hot = iz;
      }
    }
  }
  const auto t = slice_of(field, Region::Cladding, hot);
  const double a = r.front(), b = r.back();
  const double t_mean = 2.0 * RadialIntegral(r, t).total() / (b * b - a * a);
  if (!(t_mean >= m.reference_temperature - 50.0)) {
    fail(ErrorKind::Domain, "hoop_strain_summary: cladding more than 50 K below T_ref");
  }
  loads.validate();
  const double mid[] = {0.5 * (a + b)};
  const auto s = thermoelastic_cylinder(r, t, loads.gap_pressure, loads.coolant_pressure,
                                        clad_elastic(m), m.reference_temperature, mid);

  StrainReport rep;
  rep.r = mid[0];
  rep.z = mesh.clad_z()[hot];
  rep.clad_mean_temperature = t_mean;
  rep.sigma_theta = s.sigma_theta[0];
  rep.thermal = m.clad_alpha_hoop * (t_mean - m.reference_temperature);
  rep.elastic = s.hoop_elastic[0];
  rep.creep = thermal_creep_increment(rep.sigma_theta, t_mean, duration, m);
  rep.irradiation_growth = 0.0;
  rep.total = rep.thermal + rep.creep + rep.elastic + rep.irradiation_growth;
  rep.run_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

StressField stress_field(const TemperatureField& field, const MechanicsLoads& loads,
                         const MaterialParams& m) {
  loads.validate();
  const auto& mesh = field.mesh;
  if (field.temperature.size() != mesh.node_count()) {
    fail(ErrorKind::Config, "stress_field: field does not match its mesh");
  }
  StressField out{mesh, {}, {}, {}};
  out.sigma_r.assign(mesh.node_count(), 0.0);
  out.sigma_z.assign(mesh.node_count(), 0.0);
  out.sigma_theta.assign(mesh.node_count(), 0.0);

  const auto nzf = static_cast<std::ptrdiff_t>(mesh.fuel_z().size());
  const auto nzc = static_cast<std::ptrdiff_t>(mesh.clad_z().size());
  const auto total = nzf + nzc;
  // Each slice writes only its own nodes, so the output does not depend on
  // the thread schedule. Errors are collected and rethrown serially.
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    try {
      const bool fuel = k < nzf;
      const auto iz = static_cast<std::size_t>(fuel ? k : k - nzf);
      const auto t = slice_of(field, fuel ? Region::Fuel : Region::Cladding, iz);
      const auto s = fuel ? fuel_thermoelastic_slice(mesh.fuel_r(), t, loads.gap_pressure, m)
                          : lame_thermoelastic_slice(mesh.clad_r(), t, loads, m);
      for (std::size_t ir = 0; ir < t.size(); ++ir) {
        const std::size_t node = fuel ? mesh.fuel_node(iz, ir) : mesh.clad_node(iz, ir);
        out.sigma_r[node] = s.sigma_r[ir];
        out.sigma_z[node] = s.sigma_z[ir];
        out.sigma_theta[node] = s.sigma_theta[ir];
      }
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace fuelrod
