#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fuelrod/core_model.hpp"

namespace fuelrod {

enum class Region : std::uint8_t { Fuel, Cladding };

enum class BoundaryTag : std::uint8_t {
  Centerline,
  FuelOuter,
  CladInner,
  CladOuter,
  Top,
  Bottom,
};

std::string_view to_string(Region region);
Region parse_region(std::string_view text);

struct BoundaryEdge {
  BoundaryTag tag;
  Region region;
  std::size_t a;  // node indices
  std::size_t b;
};

/// Axisymmetric node lattice over the pellet and cladding.
///
/// Each region is a tensor-product lattice: fuel nodes cover
/// [0, R_fo] x [z_pb, z_pb + L_f], cladding nodes cover [R_ci, R_co] x [0, L_fr].
/// Global node numbering places every fuel node first (row-major in z, then r)
/// followed by the cladding nodes. The two lattices do not share axial
/// coordinates; the gap couples them by interpolation.
class RodMesh {
 public:
  RodMesh() = default;
  RodMesh(std::vector<double> r_fuel, std::vector<double> z_fuel,
          std::vector<double> r_clad, std::vector<double> z_clad);

  std::span<const double> fuel_r() const { return r_fuel_; }
  std::span<const double> fuel_z() const { return z_fuel_; }
  std::span<const double> clad_r() const { return r_clad_; }
  std::span<const double> clad_z() const { return z_clad_; }

  std::size_t fuel_node_count() const { return r_fuel_.size() * z_fuel_.size(); }
  std::size_t clad_node_count() const { return r_clad_.size() * z_clad_.size(); }
  std::size_t node_count() const { return fuel_node_count() + clad_node_count(); }

  std::size_t fuel_node(std::size_t iz, std::size_t ir) const {
    return iz * r_fuel_.size() + ir;
  }
  std::size_t clad_node(std::size_t iz, std::size_t ir) const {
    return fuel_node_count() + iz * r_clad_.size() + ir;
  }

  double node_r(std::size_t node) const { return node_r_[node]; }
  double node_z(std::size_t node) const { return node_z_[node]; }
  Region node_region(std::size_t node) const {
    return node < fuel_node_count() ? Region::Fuel : Region::Cladding;
  }

  std::span<const Region> cell_regions() const { return cell_regions_; }
  std::span<const BoundaryEdge> boundary() const { return boundary_; }

  /// Nodes of the cladding outer surface, bottom to top.
  std::vector<std::size_t> clad_outer_nodes() const;

 private:
  void build_topology();

  std::vector<double> r_fuel_, z_fuel_, r_clad_, z_clad_;
  std::vector<double> node_r_, node_z_;
  std::vector<Region> cell_regions_;
  std::vector<BoundaryEdge> boundary_;
};

/// Uniform lattice per region. nr_clad defaults to the reference 4 nodes.
RodMesh build_rod_mesh(const RodGeometry& geom, std::size_t nr_fuel, std::size_t nz,
                       std::size_t nr_clad = 4);

/// Recovers the lattice from per-node coordinates (e.g. a field CSV).
/// The nodes must be in the global numbering order of RodMesh.
RodMesh mesh_from_nodes(std::span<const double> r, std::span<const double> z,
                        std::span<const Region> region);

/// Control-volume lengths of a vertex-centred 1D grid (half cells at ends).
std::vector<double> control_lengths(std::span<const double> x);

}  // namespace fuelrod
