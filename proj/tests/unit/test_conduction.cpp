#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "fuelrod/channel.hpp"
#include "fuelrod/conduction.hpp"
#include "fuelrod/error.hpp"

using namespace fuelrod;

namespace {

// Fuel spanning the whole rod, so a uniform source gives a purely radial problem.
RodGeometry tall_geometry() {
  RodGeometry g;
  g.fuel_bottom = 0.0;
  g.fuel_length = g.rod_length;
  return g;
}

MaterialParams frozen_materials() {
  MaterialParams m;
  m.fuel_k_a = 1.0 / 3.0;
  m.fuel_k_b = 0.0;
  m.clad_k_a = 17.0;
  m.clad_k_b = 0.0;
  return m;
}

struct SliceDrops {
  double fuel;
  double clad;
};

SliceDrops radial_drops(std::size_t nr_fuel, std::size_t nr_clad) {
  const RodGeometry g = tall_geometry();
  const RodMesh mesh = build_rod_mesh(g, nr_fuel, 10, nr_clad);
  const auto bc = make_channel_boundary(583.15, 15.51e6, 3244.04, 0.0126, g);
  const auto coolant = isothermal_channel(mesh.clad_z(), bc, g);
  const auto src = VolumetricSource::uniform(mesh, 20.0e3, g.fuel_outer_radius);
  const auto res = assemble_and_solve_conduction(mesh, frozen_materials(), src, coolant, 0.0);
  const auto& t = res.field.temperature;
  const std::size_t iz = 5;
  return {t[mesh.fuel_node(iz, 0)] - t[mesh.fuel_node(iz, nr_fuel - 1)],
          t[mesh.clad_node(iz, 0)] - t[mesh.clad_node(iz, nr_clad - 1)]};
}

struct NominalSolve {
  RodMesh mesh;
  ChannelState coolant;
  ConductionResult result;
};

NominalSolve nominal_solve(double peak, double burnup = 0.0) {
  const RodGeometry g;
  NominalSolve s;
  s.mesh = build_rod_mesh(g, 11, 100, 4);
  const auto bc = make_channel_boundary(583.15, 15.51e6, 3244.04, 0.0126, g);
  s.coolant = isothermal_channel(s.mesh.clad_z(), bc, g);
  const auto src = VolumetricSource::from_heat_source(s.mesh, HeatSource{peak, 0.08}, g);
  s.result = assemble_and_solve_conduction(s.mesh, MaterialParams{}, src, s.coolant, burnup);
  return s;
}

}  // namespace

TEST_CASE("constant-k fuel drop matches the analytic radial solution") {
  const double expected = 20.0e3 / (4.0 * M_PI * 3.0);
  CHECK(expected == doctest::Approx(530.5).epsilon(1e-3));
  const auto d = radial_drops(64, 4);
  CHECK(std::abs(d.fuel - expected) / expected < 0.01);
}

TEST_CASE("constant-k cladding drop matches the annulus solution") {
  const RodGeometry g;
  const double expected = 20.0e3 * std::log(g.clad_outer_radius / g.clad_inner_radius) / (2.0 * M_PI * 17.0);
  CHECK(expected == doctest::Approx(24.0).epsilon(5e-3));
  const auto d = radial_drops(11, 16);
  CHECK(std::abs(d.clad - expected) / expected < 0.01);
}

TEST_CASE("cladding drop converges at second order") {
  const RodGeometry g;
  const double exact = 20.0e3 * std::log(g.clad_outer_radius / g.clad_inner_radius) / (2.0 * M_PI * 17.0);
  const double e1 = std::abs(radial_drops(11, 3).clad - exact);
  const double e2 = std::abs(radial_drops(11, 5).clad - exact);
  const double e3 = std::abs(radial_drops(11, 9).clad - exact);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
}

TEST_CASE("no source gives the coolant temperature everywhere") {
  const auto s = nominal_solve(0.0);
  for (double t : s.result.field.temperature) CHECK(std::abs(t - 583.15) < 1e-6);
  for (double q : wall_heat_flux(s.result.field, s.coolant)) CHECK(std::abs(q) < 1e-6);
}

TEST_CASE("wall heat equals the rod power") {
  const RodGeometry g;
  const auto s = nominal_solve(20.0e3);
  const auto q = wall_heat_flux(s.result.field, s.coolant);
  const auto z = s.mesh.clad_z();
  double out = 0.0;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) out += 0.5 * (q[k] + q[k + 1]) * (z[k + 1] - z[k]);
  out *= 2.0 * M_PI * g.clad_outer_radius;
  const double power = total_rod_power(HeatSource{}, g);
  CHECK(std::abs(out - power) / power < 0.005);
  for (double v : q) CHECK(v >= -1e-6);
}

TEST_CASE("heated rod field invariants") {
  const RodGeometry g;
  const auto s = nominal_solve(20.0e3);
  const auto& mesh = s.mesh;
  const auto& t = s.result.field.temperature;
  const auto hottest = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
  CHECK(mesh.node_region(hottest) == Region::Fuel);
  for (double v : t) CHECK(v >= 583.15 - 1.0);
  const auto fz = mesh.fuel_z();
  const auto fr = mesh.fuel_r();
  for (std::size_t iz = 0; iz < fz.size(); ++iz) {
    if (linear_heat_rate(fz[iz], HeatSource{}, g) <= 0.0) continue;
    for (std::size_t ir = 1; ir < fr.size(); ++ir) {
      CHECK(t[mesh.fuel_node(iz, ir)] < t[mesh.fuel_node(iz, ir - 1)]);
    }
  }
}

TEST_CASE("Picard residuals decrease") {
  const auto s = nominal_solve(30.0e3, 20.0);
  const auto& r = s.result.residuals;
  REQUIRE(r.size() >= 2);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] <= r[i - 1]);
  CHECK(r.back() < 0.01);
}

TEST_CASE("non-convergence reports the residual history") {
  const RodGeometry g;
  const RodMesh mesh = build_rod_mesh(g, 5, 20, 3);
  const auto bc = make_channel_boundary(583.15, 15.51e6, 3244.04, 0.0126, g);
  const auto coolant = isothermal_channel(mesh.clad_z(), bc, g);
  const auto src = VolumetricSource::from_heat_source(mesh, HeatSource{}, g);
  ConductionOptions opt;
  opt.max_picard_iterations = 2;
  opt.picard_tolerance = 1e-12;
  try {
    assemble_and_solve_conduction(mesh, MaterialParams{}, src, coolant, 0.0, opt);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.kind() == ErrorKind::Solver);
    CHECK(e.residuals().size() == 2);
  }
}

TEST_CASE("volumetric source is the linear rate over the pellet area") {
  const RodGeometry g;
  const RodMesh mesh = build_rod_mesh(g, 4, 12, 3);
  const HeatSource src;
  const auto q3 = VolumetricSource::from_heat_source(mesh, src, g);
  REQUIRE(q3.power_density.size() == mesh.fuel_node_count());
  const double area = M_PI * g.fuel_outer_radius * g.fuel_outer_radius;
  for (std::size_t i = 0; i < mesh.fuel_node_count(); ++i) {
    CHECK(q3.power_density[i] * area == doctest::Approx(linear_heat_rate(mesh.node_z(i), src, g)));
  }
}

TEST_CASE("linear interpolation clamps at the ends") {
  const std::vector<double> x{0.0, 1.0, 3.0};
  const std::vector<double> y{2.0, 4.0, 0.0};
  CHECK(interpolate(x, y, -1.0) == 2.0);
  CHECK(interpolate(x, y, 0.5) == doctest::Approx(3.0));
  CHECK(interpolate(x, y, 2.0) == doctest::Approx(2.0));
  CHECK(interpolate(x, y, 5.0) == 0.0);
}
