#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"

#include "fuelrod/pipeline.hpp"
#include "fuelrod/thermomech.hpp"
#include "fuelrod/train.hpp"

namespace fuelrod {

struct StrainConfig {
  MechanicsLoads loads;
  double creep_duration = 5.26e7;  // [s]
};

/// Everything a CLI run can be configured with. Sections absent from the
/// JSON keep their defaults; unknown keys are rejected.
struct RunConfig {
  SimulationConfig simulation;
  double peak_linear_rate = 20.0e3;  // single-case runs [W/m]
  double burnup = 0.0;               // [MWd/kgU]
  std::vector<CaseSpec> cases;       // explicit roster; empty selects the default roster
  bool exclude_duplicates = false;
  BurnupSweepOptions sweep;
  kh::TrainConfig training;
  StrainConfig strain;
  std::uint64_t seed = 0;

  /// Roster for `generate`, with the simulation settings filled in.
  std::vector<CaseSpec> roster() const;
  /// Overrides the dataset, training and sweep seeds.
  void apply_seed(std::uint64_t value);
};

RunConfig parse_config(const nlohmann::json& j);
/// Io when the file cannot be read, Config when it is not valid JSON.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json simulation_to_json(const SimulationConfig& c);
SimulationConfig simulation_from_json(const nlohmann::json& j);

}  // namespace fuelrod
