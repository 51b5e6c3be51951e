#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fuelrod/khnet.hpp"
#include "fuelrod/metrics.hpp"
#include "fuelrod/pipeline.hpp"
#include "fuelrod/thermomech.hpp"
#include "fuelrod/train.hpp"

namespace fuelrod::io {

namespace fs = std::filesystem;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view context);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; Io error when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> numbers(std::string_view name) const;
};

CsvTable read_csv(const fs::path& path);
void write_csv(const fs::path& path, const CsvTable& table);

/// r, z, region, T
void write_field_csv(const fs::path& path, const TemperatureField& field);
TemperatureField read_field_csv(const fs::path& path);

/// z, T_cool, h, P, Re
void write_channel_csv(const fs::path& path, const ChannelState& channel);
ChannelState read_channel_csv(const fs::path& path);

/// z, r, T, T_inf, dhat, w, eta
void write_sensors_csv(const fs::path& path, const SensorSet& sensors);
SensorSet read_sensors_csv(const fs::path& path);

/// epoch, train_mse, val_mse, lr
void write_history_csv(const fs::path& path, const kh::TrainHistory& history);

/// r, z, sigma_r, sigma_z, sigma_theta for the nodes of one region.
void write_stress_csv(const fs::path& path, const StressField& stress, Region region);

nlohmann::json to_json(const StrainReport& r);
nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const Normalization& n);
Normalization normalization_from_json(const nlohmann::json& j);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

/// Single JSON file: architecture, normalization, sensor metadata and the
/// row-major weights of both stacks.
void save_checkpoint(const fs::path& path, const kh::KhModel& model);
/// Structural error when the stored shapes are inconsistent.
kh::KhModel load_checkpoint(const fs::path& path);

/// FNV-1a (64 bit) over the compact dump of `j`, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// Writes cases/<id>/{field,channel,sensors}.csv plus manifest.json.
void write_dataset(const fs::path& dir, const Dataset& dataset);
Dataset read_dataset(const fs::path& dir);

}  // namespace fuelrod::io
