#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fuelrod/channel.hpp"
#include "fuelrod/conduction.hpp"
#include "fuelrod/core_model.hpp"
#include "fuelrod/mesh.hpp"

namespace fuelrod {

struct MeshResolution {
  std::size_t nr_fuel = 11;
  std::size_t nr_clad = 4;
  std::size_t nz = 100;
};

struct CouplingOptions {
  double relaxation = 0.7;   // applied to T_cool between rod solves
  double tolerance = 0.1;    // max axial |dT_wall| [K]
  int max_iterations = 50;
  ConductionOptions conduction;
};

/// Which coolant temperature stands in for T_inf in the cooling-law surrogate.
enum class CoolantReference { Inlet, Local };

struct SensorConfig {
  std::vector<double> z_fractions{0.2, 0.4, 0.6, 0.8};  // of L_fr
  double eta = 1.0;
  CoolantReference reference = CoolantReference::Inlet;
};

/// Everything about a rod except the operating point of one case.
struct SimulationConfig {
  RodGeometry geometry;
  MaterialParams materials;
  ChannelBoundary channel = make_channel_boundary(583.15, 15.51e6, 3244.04, 0.0126, RodGeometry{});
  double extrapolation_length = 0.08;
  MeshResolution mesh;
  CouplingOptions coupling;
  SensorConfig sensors;

  void validate() const;
};

enum class Split { Train, Validate, Test };
std::string_view to_string(Split split);
Split parse_split(std::string_view text);

struct CaseSpec {
  std::string id;
  double peak_linear_rate = 20.0e3;  // q'_0 [W/m]
  double burnup = 0.0;               // [MWd/kgU]
  Split split = Split::Train;
  SimulationConfig config;

  /// q'_0 must be 0 (isothermal reference) or lie in [5, 45] kW/m.
  void validate() const;
};

struct CoupledSolution {
  TemperatureField field;
  ChannelState channel;
  int iterations = 0;
  double residual = 0.0;            // final max |dT_wall| [K]
  std::vector<double> residuals;    // one per coupling iteration after the first
};

/// Sparse cladding-surface readings feeding the reconstruction.
struct SensorSet {
  double radius = 0.0;                     // R_co [m]
  double eta = 1.0;
  std::vector<double> z;                   // [m]
  std::vector<double> temperature;         // T_j [K]
  std::vector<double> coolant_reference;   // T_inf,j [K]
  std::vector<double> normal_derivative;   // -eta (T_j - T_inf,j)
  std::vector<double> weight;              // boundary segment lengths [m]

  std::size_t size() const { return z.size(); }
};

/// Min-max scales, computed over training cases only.
struct Normalization {
  double r_min = 0.0, r_max = 1.0;
  double z_min = 0.0, z_max = 1.0;
  double t_min = 0.0, t_max = 1.0;

  double temperature_to_unit(double t) const {
    return 2.0 * (t - t_min) / (t_max - t_min) - 1.0;
  }
  double temperature_from_unit(double u) const {
    return t_min + 0.5 * (u + 1.0) * (t_max - t_min);
  }
  /// Converts a temperature difference (no offset).
  double difference_to_unit(double dt) const { return 2.0 * dt / (t_max - t_min); }

  bool operator==(const Normalization&) const = default;
};

struct CaseRecord {
  CaseSpec spec;
  CoupledSolution solution;
  SensorSet sensors;
};

struct Dataset {
  std::vector<CaseRecord> cases;  // ordered by case id
  Normalization normalization;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::vector<const CaseRecord*> split(Split which) const;
};

/// Fixed-point exchange between the rod and channel solvers.
CoupledSolution couple_rod_channel(const CaseSpec& spec);

/// Throws Domain when a location lies off the cladding outer boundary.
SensorSet extract_sensors(const CoupledSolution& solution, std::span<const double> z_locations,
                          double eta, const SimulationConfig& config);

/// Voronoi segment lengths of `z` clipped to [lo, hi].
std::vector<double> voronoi_weights(std::span<const double> z, double lo, double hi);

Normalization compute_normalization(std::span<const CaseRecord* const> training);

/// Runs every case (in parallel, results ordered by id) and assembles the
/// dataset. Throws Config if no test case is present.
Dataset generate_dataset(std::span<const CaseSpec> specs, std::uint64_t seed = 0);

/// Training {10,12,16,18,22,24,30,36}, validating {14,16}, testing {20} kW/m.
/// With `exclude_duplicates` the validating 16 kW/m case is dropped.
std::vector<CaseSpec> default_roster(const SimulationConfig& config,
                                    bool exclude_duplicates = false);

struct BurnupSweepOptions {
  std::size_t n_cases = 70;
  double burnup_min = 2.4;
  double burnup_max = 59.7;
  double peak_linear_rate = 20.0e3;
  std::uint64_t seed = 2024;
};

inline constexpr double kBurnupValidityMax = 80.0;  // [MWd/kgU]

/// Case specs for a seeded burnup sweep with 60/20/20 split proportions.
std::vector<CaseSpec> burnup_sweep_specs(const SimulationConfig& config,
                                         const BurnupSweepOptions& options);

Dataset burnup_sweep(const SimulationConfig& config, const BurnupSweepOptions& options);

}  // namespace fuelrod
