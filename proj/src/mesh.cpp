#include "fuelrod/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fuelrod/error.hpp"

namespace fuelrod {

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  x.back() = b;
  return x;
}

void require_increasing(std::span<const double> x, const char* what) {
  if (x.size() < 2) {
    fail(ErrorKind::Config, std::string("mesh: ") + what + " needs at least 2 nodes");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      fail(ErrorKind::Config, std::string("mesh: ") + what + " not strictly increasing");
    }
  }
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string_view to_string(Region region) {
  return region == Region::Fuel ? "fuel" : "cladding";
}

Region parse_region(std::string_view text) {
  if (text == "fuel") return Region::Fuel;
  if (text == "cladding") return Region::Cladding;
  fail(ErrorKind::Io, "unknown region label '" + std::string(text) + "'");
}

RodMesh::RodMesh(std::vector<double> r_fuel, std::vector<double> z_fuel,
                 std::vector<double> r_clad, std::vector<double> z_clad)
    : r_fuel_(std::move(r_fuel)),
      z_fuel_(std::move(z_fuel)),
      r_clad_(std::move(r_clad)),
      z_clad_(std::move(z_clad)) {
  require_increasing(r_fuel_, "fuel radial nodes");
  require_increasing(z_fuel_, "fuel axial nodes");
  require_increasing(r_clad_, "cladding radial nodes");
  require_increasing(z_clad_, "cladding axial nodes");
  if (!(r_fuel_.back() < r_clad_.front())) {
    fail(ErrorKind::Config, "mesh: fuel and cladding radial ranges overlap");
  }
  build_topology();
}

void RodMesh::build_topology() {
  const std::size_t n = node_count();
  node_r_.resize(n);
  node_z_.resize(n);
  for (std::size_t iz = 0; iz < z_fuel_.size(); ++iz) {
    for (std::size_t ir = 0; ir < r_fuel_.size(); ++ir) {
      node_r_[fuel_node(iz, ir)] = r_fuel_[ir];
      node_z_[fuel_node(iz, ir)] = z_fuel_[iz];
    }
  }
  for (std::size_t iz = 0; iz < z_clad_.size(); ++iz) {
    for (std::size_t ir = 0; ir < r_clad_.size(); ++ir) {
      node_r_[clad_node(iz, ir)] = r_clad_[ir];
      node_z_[clad_node(iz, ir)] = z_clad_[iz];
    }
  }

  cell_regions_.assign((r_fuel_.size() - 1) * (z_fuel_.size() - 1), Region::Fuel);
  cell_regions_.insert(cell_regions_.end(), (r_clad_.size() - 1) * (z_clad_.size() - 1),
                       Region::Cladding);

  boundary_.clear();
  const std::size_t nrf = r_fuel_.size(), nzf = z_fuel_.size();
  const std::size_t nrc = r_clad_.size(), nzc = z_clad_.size();
  for (std::size_t iz = 0; iz + 1 < nzf; ++iz) {
    boundary_.push_back({BoundaryTag::Centerline, Region::Fuel, fuel_node(iz, 0), fuel_node(iz + 1, 0)});
    boundary_.push_back({BoundaryTag::FuelOuter, Region::Fuel, fuel_node(iz, nrf - 1),
                         fuel_node(iz + 1, nrf - 1)});
  }
  for (std::size_t ir = 0; ir + 1 < nrf; ++ir) {
    boundary_.push_back({BoundaryTag::Bottom, Region::Fuel, fuel_node(0, ir), fuel_node(0, ir + 1)});
    boundary_.push_back({BoundaryTag::Top, Region::Fuel, fuel_node(nzf - 1, ir), fuel_node(nzf - 1, ir + 1)});
  }
  for (std::size_t iz = 0; iz + 1 < nzc; ++iz) {
    boundary_.push_back({BoundaryTag::CladInner, Region::Cladding, clad_node(iz, 0), clad_node(iz + 1, 0)});
    boundary_.push_back({BoundaryTag::CladOuter, Region::Cladding, clad_node(iz, nrc - 1),
                         clad_node(iz + 1, nrc - 1)});
  }
  for (std::size_t ir = 0; ir + 1 < nrc; ++ir) {
    boundary_.push_back({BoundaryTag::Bottom, Region::Cladding, clad_node(0, ir), clad_node(0, ir + 1)});
    boundary_.push_back({BoundaryTag::Top, Region::Cladding, clad_node(nzc - 1, ir), clad_node(nzc - 1, ir + 1)});
  }
}

std::vector<std::size_t> RodMesh::clad_outer_nodes() const {
  std::vector<std::size_t> nodes(z_clad_.size());
  for (std::size_t iz = 0; iz < z_clad_.size(); ++iz) nodes[iz] = clad_node(iz, r_clad_.size() - 1);
  return nodes;
}

RodMesh build_rod_mesh(const RodGeometry& geom, std::size_t nr_fuel, std::size_t nz,
                       std::size_t nr_clad) {
  geom.validate();
  if (nr_fuel < 3) fail(ErrorKind::Config, "mesh: nr_fuel must be >= 3");
  if (nz < 10) fail(ErrorKind::Config, "mesh: nz must be >= 10");
  if (nr_clad < 2) fail(ErrorKind::Config, "mesh: nr_clad must be >= 2");
  return RodMesh(linspace(0.0, geom.fuel_outer_radius, nr_fuel),
                 linspace(geom.fuel_bottom, geom.fuel_top(), nz),
                 linspace(geom.clad_inner_radius, geom.clad_outer_radius, nr_clad),
                 linspace(0.0, geom.rod_length, nz));
}

RodMesh mesh_from_nodes(std::span<const double> r, std::span<const double> z,
                        std::span<const Region> region) {
  if (r.size() != z.size() || r.size() != region.size()) {
    fail(ErrorKind::Io, "mesh_from_nodes: column lengths differ");
  }
  std::vector<double> rf, zf, rc, zc;
  std::size_t n_fuel = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (region[i] == Region::Fuel) {
      if (i != n_fuel) fail(ErrorKind::Io, "mesh_from_nodes: fuel nodes must precede cladding nodes");
      ++n_fuel;
      rf.push_back(r[i]);
      zf.push_back(z[i]);
    } else {
      rc.push_back(r[i]);
      zc.push_back(z[i]);
    }
  }
  RodMesh mesh(unique_sorted(rf), unique_sorted(zf), unique_sorted(rc), unique_sorted(zc));
  if (mesh.node_count() != r.size()) {
    fail(ErrorKind::Io, "mesh_from_nodes: nodes do not form a complete lattice");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (mesh.node_r(i) != r[i] || mesh.node_z(i) != z[i]) {
      fail(ErrorKind::Io, "mesh_from_nodes: node order does not match lattice numbering");
    }
  }
  return mesh;
}

std::vector<double> control_lengths(std::span<const double> x) {
  std::vector<double> len(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    len[i] += h;
    len[i + 1] += h;
  }
  return len;
}

}  // namespace fuelrod
