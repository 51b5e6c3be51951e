#include "fuelrod/conduction.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod {

double interpolate(std::span<const double> x, std::span<const double> y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double t = (at - x[i]) / (x[i + 1] - x[i]);
  return y[i] + t * (y[i + 1] - y[i]);
}

VolumetricSource VolumetricSource::from_heat_source(const RodMesh& mesh, const HeatSource& src,
                                                    const RodGeometry& geom) {
  const double area = kPi * geom.fuel_outer_radius * geom.fuel_outer_radius;
  VolumetricSource out;
  out.power_density.resize(mesh.fuel_node_count());
  for (std::size_t i = 0; i < mesh.fuel_node_count(); ++i) {
    out.power_density[i] = linear_heat_rate(mesh.node_z(i), src, geom) / area;
  }
  return out;
}

VolumetricSource VolumetricSource::uniform(const RodMesh& mesh, double linear_rate,
                                           double fuel_outer_radius) {
  VolumetricSource out;
  out.power_density.assign(mesh.fuel_node_count(),
                           linear_rate / (kPi * fuel_outer_radius * fuel_outer_radius));
  return out;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Radii bounding the control volume of each radial node.
struct RadialCells {
  std::vector<double> inner, outer;
};

RadialCells radial_cells(std::span<const double> r) {
  RadialCells c;
  const std::size_t n = r.size();
  c.inner.resize(n);
  c.outer.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.inner[i] = i == 0 ? r.front() : 0.5 * (r[i - 1] + r[i]);
    c.outer[i] = i + 1 == n ? r.back() : 0.5 * (r[i] + r[i + 1]);
  }
  return c;
}

void add_link(std::vector<Triplet>& a, std::size_t i, std::size_t j, double g) {
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  a.emplace_back(ii, ii, g);
  a.emplace_back(jj, jj, g);
  a.emplace_back(ii, jj, -g);
  a.emplace_back(jj, ii, -g);
}

// Conductive links inside one tensor-product region.
template <typename NodeFn>
void add_region(std::vector<Triplet>& a, std::span<const double> r, std::span<const double> z,
                const std::vector<double>& k, NodeFn node) {
  const auto cells = radial_cells(r);
  const auto lz = control_lengths(z);
  for (std::size_t iz = 0; iz < z.size(); ++iz) {
    for (std::size_t ir = 0; ir + 1 < r.size(); ++ir) {
      const std::size_t p = node(iz, ir), q = node(iz, ir + 1);
      const double rf = cells.outer[ir];
      const double kf = 0.5 * (k[p] + k[q]);
      add_link(a, p, q, kf * 2.0 * kPi * rf * lz[iz] / (r[ir + 1] - r[ir]));
    }
  }
  for (std::size_t iz = 0; iz + 1 < z.size(); ++iz) {
    for (std::size_t ir = 0; ir < r.size(); ++ir) {
      const std::size_t p = node(iz, ir), q = node(iz + 1, ir);
      const double area =
          kPi * (cells.outer[ir] * cells.outer[ir] - cells.inner[ir] * cells.inner[ir]);
      const double kf = 0.5 * (k[p] + k[q]);
      add_link(a, p, q, kf * area / (z[iz + 1] - z[iz]));
    }
  }
}

}  // namespace

ConductionResult assemble_and_solve_conduction(const RodMesh& mesh, const MaterialParams& m,
                                               const VolumetricSource& src,
                                               const ChannelState& coolant, double burnup,
                                               const ConductionOptions& options) {
  const std::size_t n = mesh.node_count();
  if (src.power_density.size() != mesh.fuel_node_count()) {
    fail(ErrorKind::Config, "conduction: source size does not match the fuel lattice");
  }
  if (coolant.size() < 2 || coolant.z.front() > mesh.clad_z().front() + 1e-9 ||
      coolant.z.back() < mesh.clad_z().back() - 1e-9) {
    fail(ErrorKind::Config, "conduction: coolant state must cover the rod's axial span");
  }

  const auto rf = mesh.fuel_r(), zf = mesh.fuel_z();
  const auto rc = mesh.clad_r(), zc = mesh.clad_z();
  const std::size_t nrf = rf.size(), nrc = rc.size();
  const double r_fo = rf.back(), r_co = rc.back();
  const auto fuel_cells = radial_cells(rf);
  const auto lzf = control_lengths(zf);
  const auto lzc = control_lengths(zc);
  auto fuel_node = [&](std::size_t iz, std::size_t ir) { return mesh.fuel_node(iz, ir); };
  auto clad_node = [&](std::size_t iz, std::size_t ir) { return mesh.clad_node(iz, ir); };

  // Load vector and the temperature-independent part of the operator.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<Triplet> fixed;
  for (std::size_t iz = 0; iz < zf.size(); ++iz) {
    for (std::size_t ir = 0; ir < nrf; ++ir) {
      const double vol = kPi *
                         (fuel_cells.outer[ir] * fuel_cells.outer[ir] -
                          fuel_cells.inner[ir] * fuel_cells.inner[ir]) *
                         lzf[iz];
      const std::size_t p = fuel_node(iz, ir);
      rhs[static_cast<Eigen::Index>(p)] += src.power_density[p] * vol;
    }
  }
  for (std::size_t iz = 0; iz < zc.size(); ++iz) {
    const double h = interpolate(coolant.z, coolant.htc, zc[iz]);
    const double t_cool = interpolate(coolant.z, coolant.temperature, zc[iz]);
    const double g = h * 2.0 * kPi * r_co * lzc[iz];
    const auto p = static_cast<Eigen::Index>(clad_node(iz, nrc - 1));
    fixed.emplace_back(p, p, g);
    rhs[p] += g * t_cool;
  }
  // Gap conductance between each pellet surface node and the cladding inner
  // surface interpolated at the same elevation: G v v^T, v = e_f - sum w e_c.
  for (std::size_t iz = 0; iz < zf.size(); ++iz) {
    const double g = m.gap_conductance * 2.0 * kPi * r_fo * lzf[iz];
    const double zq = zf[iz];
    std::size_t c = static_cast<std::size_t>(std::upper_bound(zc.begin(), zc.end(), zq) - zc.begin());
    c = std::clamp<std::size_t>(c, 1, zc.size() - 1) - 1;
    const double t = std::clamp((zq - zc[c]) / (zc[c + 1] - zc[c]), 0.0, 1.0);
    const std::size_t idx[3] = {fuel_node(iz, nrf - 1), clad_node(c, 0), clad_node(c + 1, 0)};
    const double v[3] = {1.0, -(1.0 - t), -t};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (v[i] * v[j] != 0.0) {
          fixed.emplace_back(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]),
                             g * v[i] * v[j]);
        }
      }
    }
  }

  ConductionResult result;
  double t_start = 0.0;
  for (double t : coolant.temperature) t_start += t;
  t_start /= static_cast<double>(coolant.size());
  std::vector<double> temp(n, t_start);
  std::vector<double> k(n);

  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool analyzed = false;

  for (int it = 1; it <= options.max_picard_iterations; ++it) {
    for (std::size_t i = 0; i < mesh.fuel_node_count(); ++i) {
      k[i] = fuel_conductivity(temp[i], burnup, m);
    }
    for (std::size_t i = mesh.fuel_node_count(); i < n; ++i) {
      k[i] = clad_conductivity(temp[i], m);
    }
    std::vector<Triplet> trips = fixed;
    add_region(trips, rf, zf, k, fuel_node);
    add_region(trips, rc, zc, k, clad_node);
    a.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      solver.analyzePattern(a);
      analyzed = true;
    }
    solver.factorize(a);
    if (solver.info() != Eigen::Success) {
      fail(ErrorKind::Config, "conduction: singular system (check boundary conditions)");
    }
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !x.allFinite()) {
      fail(ErrorKind::Config, "conduction: linear solve failed");
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      change = std::max(change, std::abs(x[static_cast<Eigen::Index>(i)] - temp[i]));
      temp[i] = x[static_cast<Eigen::Index>(i)];
    }
    result.residuals.push_back(change);
    result.iterations = it;
    if (change < options.picard_tolerance) {
      result.field = TemperatureField{mesh, std::move(temp)};
      return result;
    }
  }
  std::ostringstream os;
  os << "conduction: Picard iteration did not converge in " << options.max_picard_iterations
     << " sweeps (last max|dT| = " << result.residuals.back() << " K)";
  throw SolverError(os.str(), result.residuals);
}

std::vector<double> wall_heat_flux(const TemperatureField& field, const ChannelState& coolant) {
  const auto& mesh = field.mesh;
  const auto zc = mesh.clad_z();
  const auto outer = mesh.clad_outer_nodes();
  std::vector<double> q(zc.size());
  for (std::size_t iz = 0; iz < zc.size(); ++iz) {
    const double h = interpolate(coolant.z, coolant.htc, zc[iz]);
    const double t_cool = interpolate(coolant.z, coolant.temperature, zc[iz]);
    q[iz] = h * (field.temperature[outer[iz]] - t_cool);
  }
  return q;
}

}  // namespace fuelrod
