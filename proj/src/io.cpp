#include "fuelrod/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fuelrod/config.hpp"
#include "fuelrod/error.hpp"

namespace fuelrod::io {

using nlohmann::json;

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorKind::Io, std::string(context) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorKind::Io, "csv: missing column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_double(row[c], name));
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

std::vector<std::string> row_of(std::initializer_list<double> values) {
  std::vector<std::string> row;
  for (double v : values) row.push_back(format_double(v));
  return row;
}

json stack_to_json(const kh::StackLayout& s, const std::vector<double>& p) {
  json layers = json::array();
  for (std::size_t l = 0; l < s.layers(); ++l) {
    const auto k0 = p.begin() + static_cast<std::ptrdiff_t>(s.kernel_offset[l]);
    const auto b0 = p.begin() + static_cast<std::ptrdiff_t>(s.bias_offset[l]);
    layers.push_back({{"shape", {s.widths[l], s.widths[l + 1]}},
                      {"kernel", std::vector<double>(k0, b0)},
                      {"bias", std::vector<double>(b0, b0 + static_cast<std::ptrdiff_t>(s.widths[l + 1]))}});
  }
  return layers;
}

void stack_from_json(const json& layers, const kh::StackLayout& s, std::vector<double>& p,
                     const char* name) {
  if (!layers.is_array() || layers.size() != s.layers()) {
    fail(ErrorKind::Structural, std::string("checkpoint: stack '") + name + "' has wrong depth");
  }
  for (std::size_t l = 0; l < s.layers(); ++l) {
    const auto shape = layers[l].at("shape").get<std::vector<std::size_t>>();
    const auto kernel = layers[l].at("kernel").get<std::vector<double>>();
    const auto bias = layers[l].at("bias").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] != s.widths[l] || shape[1] != s.widths[l + 1] ||
        kernel.size() != shape[0] * shape[1] || bias.size() != shape[1]) {
      std::ostringstream os;
      os << "checkpoint: stack '" << name << "' layer " << l << " has inconsistent shapes";
      fail(ErrorKind::Structural, os.str());
    }
    std::copy(kernel.begin(), kernel.end(), p.begin() + static_cast<std::ptrdiff_t>(s.kernel_offset[l]));
    std::copy(bias.begin(), bias.end(), p.begin() + static_cast<std::ptrdiff_t>(s.bias_offset[l]));
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json region_json(const RegionMetrics& m) {
  return {{"count", m.count},
          {"r_squared", optional_number(m.r_squared)},
          {"nl2", m.nl2},
          {"max_abs_error", m.max_abs_error},
          {"max_rel_error", m.max_rel_error}};
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split_line(line);
    if (row.size() != t.header.size()) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected " << t.header.size() << " fields, got "
         << row.size();
      fail(ErrorKind::Io, os.str());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  auto out = open_out(path);
  auto emit = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

void write_field_csv(const fs::path& path, const TemperatureField& field) {
  CsvTable t{{"r", "z", "region", "T"}, {}};
  const auto& mesh = field.mesh;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    t.rows.push_back({format_double(mesh.node_r(i)), format_double(mesh.node_z(i)),
                      std::string(to_string(mesh.node_region(i))),
                      format_double(field.temperature[i])});
  }
  write_csv(path, t);
}

TemperatureField read_field_csv(const fs::path& path) {
  const auto t = read_csv(path);
  const auto r = t.numbers("r");
  const auto z = t.numbers("z");
  const auto temp = t.numbers("T");
  const std::size_t rc = t.column("region");
  std::vector<Region> region;
  for (const auto& row : t.rows) {
    try {
      region.push_back(parse_region(row[rc]));
    } catch (const Error& e) {
      fail(ErrorKind::Io, path.string() + ": " + e.what());
    }
  }
  RodMesh mesh;
  try {
    mesh = mesh_from_nodes(r, z, region);
  } catch (const Error& e) {
    fail(ErrorKind::Io, path.string() + ": " + e.what());
  }
  return {std::move(mesh), temp};
}

void write_channel_csv(const fs::path& path, const ChannelState& c) {
  CsvTable t{{"z", "T_cool", "h", "P", "Re"}, {}};
  for (std::size_t k = 0; k < c.size(); ++k) {
    t.rows.push_back(row_of({c.z[k], c.temperature[k], c.htc[k], c.pressure[k], c.reynolds[k]}));
  }
  write_csv(path, t);
}

ChannelState read_channel_csv(const fs::path& path) {
  const auto t = read_csv(path);
  ChannelState c;
  c.z = t.numbers("z");
  c.temperature = t.numbers("T_cool");
  c.htc = t.numbers("h");
  c.pressure = t.numbers("P");
  c.reynolds = t.numbers("Re");
  return c;
}

void write_sensors_csv(const fs::path& path, const SensorSet& s) {
  CsvTable t{{"z", "r", "T", "T_inf", "dhat", "w", "eta"}, {}};
  for (std::size_t j = 0; j < s.size(); ++j) {
    t.rows.push_back(row_of({s.z[j], s.radius, s.temperature[j], s.coolant_reference[j],
                             s.normal_derivative[j], s.weight[j], s.eta}));
  }
  write_csv(path, t);
}

SensorSet read_sensors_csv(const fs::path& path) {
  const auto t = read_csv(path);
  if (t.rows.empty()) fail(ErrorKind::Io, path.string() + ": no sensors");
  SensorSet s;
  s.z = t.numbers("z");
  s.temperature = t.numbers("T");
  s.coolant_reference = t.numbers("T_inf");
  s.normal_derivative = t.numbers("dhat");
  s.weight = t.numbers("w");
  const auto r = t.numbers("r");
  const auto eta = t.numbers("eta");
  s.radius = r.front();
  s.eta = eta.front();
  for (std::size_t j = 1; j < r.size(); ++j) {
    if (r[j] != s.radius || eta[j] != s.eta) {
      fail(ErrorKind::Io, path.string() + ": sensors must share one radius and eta");
    }
  }
  return s;
}

void write_history_csv(const fs::path& path, const kh::TrainHistory& h) {
  CsvTable t{{"epoch", "train_mse", "val_mse", "lr"}, {}};
  for (std::size_t e = 0; e < h.train_mse.size(); ++e) {
    t.rows.push_back({std::to_string(e), format_double(h.train_mse[e]),
                      format_double(h.val_mse[e]), format_double(h.learning_rate[e])});
  }
  write_csv(path, t);
}

void write_stress_csv(const fs::path& path, const StressField& s, Region region) {
  CsvTable t{{"r", "z", "sigma_r", "sigma_z", "sigma_theta"}, {}};
  for (std::size_t i = 0; i < s.mesh.node_count(); ++i) {
    if (s.mesh.node_region(i) != region) continue;
    t.rows.push_back(row_of({s.mesh.node_r(i), s.mesh.node_z(i), s.sigma_r[i], s.sigma_z[i],
                             s.sigma_theta[i]}));
  }
  write_csv(path, t);
}

json to_json(const StrainReport& r) {
  return {{"thermal_expansion", r.thermal},
          {"creep", r.creep},
          {"elastic", r.elastic},
          {"irradiation_growth", r.irradiation_growth},
          {"total", r.total},
          {"r", r.r},
          {"z", r.z},
          {"clad_mean_temperature", r.clad_mean_temperature},
          {"sigma_theta", r.sigma_theta},
          {"run_time", r.run_time}};
}

json to_json(const MetricsReport& r) {
  return {{"r_squared", r.r_squared},
          {"nl2", r.nl2},
          {"max_abs_error", r.max_abs_error},
          {"max_rel_error", r.max_rel_error},
          {"fuel", region_json(r.fuel)},
          {"cladding", region_json(r.cladding)}};
}

json to_json(const Normalization& n) {
  return {{"r_min", n.r_min}, {"r_max", n.r_max}, {"z_min", n.z_min},
          {"z_max", n.z_max}, {"t_min", n.t_min}, {"t_max", n.t_max}};
}

Normalization normalization_from_json(const json& j) {
  Normalization n;
  n.r_min = j.at("r_min").get<double>();
  n.r_max = j.at("r_max").get<double>();
  n.z_min = j.at("z_min").get<double>();
  n.z_max = j.at("z_max").get<double>();
  n.t_min = j.at("t_min").get<double>();
  n.t_max = j.at("t_max").get<double>();
  return n;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Io, path.string() + " is not valid JSON: " + e.what());
  }
}

void save_checkpoint(const fs::path& path, const kh::KhModel& model) {
  model.validate();
  json j{{"format", "fuelrod-khnet"},
         {"version", 1},
         {"architecture",
          {{"inputs", kh::kFeatureCount},
           {"hidden", model.hidden},
           {"outputs", 1},
           {"activation", "tanh"},
           {"features", {"r", "z", "z_sensor", "dz", "rho"}},
           {"radial_stretch", kh::kRadialStretch}}},
         {"normalization", to_json(model.normalization)},
         {"eta", model.eta},
         {"sensor_radius", model.sensor_radius},
         {"sensor_z", model.sensor_z},
         {"green", stack_to_json(model.green, model.params)},
         {"green_normal", stack_to_json(model.green_normal, model.params)}};
  write_json(path, j);
}

kh::KhModel load_checkpoint(const fs::path& path) {
  const json j = read_json(path);
  try {
    if (j.at("format") != "fuelrod-khnet" || j.at("version") != 1) {
      fail(ErrorKind::Structural, "checkpoint: unrecognised format or version");
    }
    const auto& arch = j.at("architecture");
    if (arch.at("inputs").get<std::size_t>() != kh::kFeatureCount ||
        arch.at("outputs").get<std::size_t>() != 1 || arch.at("activation") != "tanh") {
      fail(ErrorKind::Structural, "checkpoint: unsupported architecture");
    }
    kh::KhModel m = kh::KhModel::create(
        arch.at("hidden").get<std::vector<std::size_t>>(),
        normalization_from_json(j.at("normalization")), j.at("eta").get<double>(),
        j.at("sensor_radius").get<double>(), j.at("sensor_z").get<std::vector<double>>());
    stack_from_json(j.at("green"), m.green, m.params, "green");
    stack_from_json(j.at("green_normal"), m.green_normal, m.params, "green_normal");
    m.validate();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::Structural, "checkpoint " + path.string() + ": " + e.what());
  }
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json manifest_body(const Dataset& ds) {
  json cases = json::array();
  for (const auto& c : ds.cases) {
    cases.push_back({{"id", c.spec.id},
                     {"split", std::string(to_string(c.spec.split))},
                     {"peak_linear_rate", c.spec.peak_linear_rate},
                     {"burnup", c.spec.burnup},
                     {"coupling_iterations", c.solution.iterations},
                     {"coupling_residual", c.solution.residual}});
  }
  const SimulationConfig cfg = ds.cases.empty() ? SimulationConfig{} : ds.cases.front().spec.config;
  return {{"config", simulation_to_json(cfg)}, {"cases", cases}, {"seed", ds.seed}};
}

}  // namespace

void write_dataset(const fs::path& dir, const Dataset& ds) {
  json manifest = manifest_body(ds);
  const std::string hash = ds.config_hash.empty() ? config_hash(manifest) : ds.config_hash;
  json splits = {{"train", json::array()}, {"validate", json::array()}, {"test", json::array()}};
  for (const auto& c : ds.cases) {
    splits[std::string(to_string(c.spec.split))].push_back(c.spec.id);
    const fs::path cd = dir / "cases" / c.spec.id;
    write_field_csv(cd / "field.csv", c.solution.field);
    write_channel_csv(cd / "channel.csv", c.solution.channel);
    write_sensors_csv(cd / "sensors.csv", c.sensors);
  }
  manifest["splits"] = splits;
  manifest["normalization"] = to_json(ds.normalization);
  manifest["config_hash"] = hash;
  write_json(dir / "manifest.json", manifest);
}

Dataset read_dataset(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  Dataset ds;
  try {
    const SimulationConfig cfg = simulation_from_json(m.at("config"));
    ds.seed = m.at("seed").get<std::uint64_t>();
    ds.normalization = normalization_from_json(m.at("normalization"));
    ds.config_hash = m.at("config_hash").get<std::string>();
    for (const auto& e : m.at("cases")) {
      CaseRecord rec;
      rec.spec.id = e.at("id").get<std::string>();
      rec.spec.split = parse_split(e.at("split").get<std::string>());
      rec.spec.peak_linear_rate = e.at("peak_linear_rate").get<double>();
      rec.spec.burnup = e.at("burnup").get<double>();
      rec.spec.config = cfg;
      rec.solution.iterations = e.at("coupling_iterations").get<int>();
      rec.solution.residual = e.at("coupling_residual").get<double>();
      const fs::path cd = dir / "cases" / rec.spec.id;
      rec.solution.field = read_field_csv(cd / "field.csv");
      rec.solution.channel = read_channel_csv(cd / "channel.csv");
      rec.sensors = read_sensors_csv(cd / "sensors.csv");
      ds.cases.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "dataset manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }
  json body = manifest_body(ds);
  if (config_hash(body) != ds.config_hash) {
    fail(ErrorKind::Io, "dataset manifest: config_hash does not match its contents");
  }
  return ds;
}

}  // namespace fuelrod::io
