#include "fuelrod/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "fuelrod/error.hpp"

namespace fuelrod {

using nlohmann::json;

namespace {

// Reads optional keys from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) fail(ErrorKind::Config, "config: '" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::Config, "config: '" + name_ + "." + key + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        fail(ErrorKind::Config, "config: unknown key '" + name_ + "." + item.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

CoolantReference parse_reference(const std::string& s) {
  if (s == "inlet") return CoolantReference::Inlet;
  if (s == "local") return CoolantReference::Local;
  fail(ErrorKind::Config, "config: sensors.coolant_reference must be 'inlet' or 'local'");
}

void read_simulation(Section& root, SimulationConfig& c, RunConfig* run) {
  if (const json* g = root.child("geometry")) {
    Section s(*g, "geometry");
    s.get("rod_length", c.geometry.rod_length);
    s.get("fuel_length", c.geometry.fuel_length);
    s.get("fuel_outer_radius", c.geometry.fuel_outer_radius);
    s.get("clad_inner_radius", c.geometry.clad_inner_radius);
    s.get("clad_outer_radius", c.geometry.clad_outer_radius);
    s.get("fuel_bottom", c.geometry.fuel_bottom);
    s.finish();
  }
  if (const json* g = root.child("materials")) {
    auto& m = c.materials;
    Section s(*g, "materials");
    s.get("fuel_k_a", m.fuel_k_a);
    s.get("fuel_k_b", m.fuel_k_b);
    s.get("fuel_k_burnup", m.fuel_k_burnup);
    s.get("clad_k_a", m.clad_k_a);
    s.get("clad_k_b", m.clad_k_b);
    s.get("fuel_alpha", m.fuel_alpha);
    s.get("clad_alpha_hoop", m.clad_alpha_hoop);
    s.get("clad_alpha_axial", m.clad_alpha_axial);
    s.get("clad_youngs", m.clad_youngs);
    s.get("clad_poisson", m.clad_poisson);
    s.get("fuel_youngs", m.fuel_youngs);
    s.get("fuel_poisson", m.fuel_poisson);
    s.get("gap_conductance", m.gap_conductance);
    s.get("creep_coefficient", m.creep_coefficient);
    s.get("creep_exponent", m.creep_exponent);
    s.get("creep_activation", m.creep_activation);
    s.get("reference_temperature", m.reference_temperature);
    s.finish();
  }
  {
    double t_in = c.channel.inlet_temperature, p_out = c.channel.outlet_pressure;
    double g_flux = c.channel.mass_flux, pitch = c.channel.pitch;
    if (const json* g = root.child("channel")) {
      Section s(*g, "channel");
      s.get("inlet_temperature", t_in);
      s.get("outlet_pressure", p_out);
      s.get("mass_flux", g_flux);
      s.get("pitch", pitch);
      s.finish();
    }
    c.channel = make_channel_boundary(t_in, p_out, g_flux, pitch, c.geometry);
  }
  if (const json* g = root.child("source")) {
    Section s(*g, "source");
    s.get("extrapolation_length", c.extrapolation_length);
    if (run) {
      s.get("peak_linear_rate", run->peak_linear_rate);
      s.get("burnup", run->burnup);
    }
    s.finish();
  }
  if (const json* g = root.child("mesh")) {
    Section s(*g, "mesh");
    s.get("nr_fuel", c.mesh.nr_fuel);
    s.get("nr_clad", c.mesh.nr_clad);
    s.get("nz", c.mesh.nz);
    s.finish();
  }
  if (const json* g = root.child("solver")) {
    Section s(*g, "solver");
    s.get("relaxation", c.coupling.relaxation);
    s.get("tolerance", c.coupling.tolerance);
    s.get("max_iterations", c.coupling.max_iterations);
    s.get("picard_tolerance", c.coupling.conduction.picard_tolerance);
    s.get("max_picard_iterations", c.coupling.conduction.max_picard_iterations);
    s.finish();
  }
  if (const json* g = root.child("sensors")) {
    Section s(*g, "sensors");
    s.get("z_fractions", c.sensors.z_fractions);
    s.get("eta", c.sensors.eta);
    std::string ref = c.sensors.reference == CoolantReference::Inlet ? "inlet" : "local";
    s.get("coolant_reference", ref);
    c.sensors.reference = parse_reference(ref);
    s.finish();
  }
}

}  // namespace

std::vector<CaseSpec> RunConfig::roster() const {
  if (cases.empty()) return default_roster(simulation, exclude_duplicates);
  std::vector<CaseSpec> out = cases;
  for (auto& c : out) c.config = simulation;
  return out;
}

void RunConfig::apply_seed(std::uint64_t value) {
  seed = value;
  training.seed = value;
  sweep.seed = value;
}

RunConfig parse_config(const json& j) {
  RunConfig run;
  Section root(j, "config");
  read_simulation(root, run.simulation, &run);

  if (const json* g = root.child("dataset")) {
    Section s(*g, "dataset");
    s.get("exclude_duplicates", run.exclude_duplicates);
    if (const json* roster = s.child("roster")) {
      if (roster->is_string()) {
        if (roster->get<std::string>() != "default") {
          fail(ErrorKind::Config, "config: dataset.roster must be 'default' or a list of cases");
        }
      } else if (roster->is_array()) {
        for (const auto& e : *roster) {
          Section cs(e, "dataset.roster[]");
          CaseSpec spec;
          std::string split = "train";
          cs.get("id", spec.id);
          cs.get("peak_linear_rate", spec.peak_linear_rate);
          cs.get("burnup", spec.burnup);
          cs.get("split", split);
          cs.finish();
          if (spec.id.empty()) fail(ErrorKind::Config, "config: every roster case needs an id");
          spec.split = parse_split(split);
          run.cases.push_back(std::move(spec));
        }
      } else {
        fail(ErrorKind::Config, "config: dataset.roster must be 'default' or a list of cases");
      }
    }
    s.finish();
  }
  if (const json* g = root.child("sweep")) {
    Section s(*g, "sweep");
    s.get("n_cases", run.sweep.n_cases);
    s.get("burnup_min", run.sweep.burnup_min);
    s.get("burnup_max", run.sweep.burnup_max);
    s.get("peak_linear_rate", run.sweep.peak_linear_rate);
    s.get("seed", run.sweep.seed);
    s.finish();
  }
  if (const json* g = root.child("training")) {
    auto& t = run.training;
    Section s(*g, "training");
    s.get("epochs", t.epochs);
    s.get("batch_size", t.batch_size);
    s.get("lr_breakpoints", t.schedule.breakpoints);
    s.get("lr_rates", t.schedule.rates);
    s.get("beta1", t.beta1);
    s.get("beta2", t.beta2);
    s.get("epsilon", t.epsilon);
    s.get("seed", t.seed);
    s.get("hidden", t.hidden);
    s.finish();
    t.validate();
  }
  if (const json* g = root.child("strain")) {
    Section s(*g, "strain");
    s.get("gap_pressure", run.strain.loads.gap_pressure);
    s.get("coolant_pressure", run.strain.loads.coolant_pressure);
    s.get("creep_duration", run.strain.creep_duration);
    s.finish();
    run.strain.loads.validate();
    if (!(run.strain.creep_duration >= 0.0)) {
      fail(ErrorKind::Config, "config: strain.creep_duration must be >= 0");
    }
  }
  if (root.child("seed")) {
    std::uint64_t seed = 0;
    root.get("seed", seed);
    run.apply_seed(seed);
  }
  root.finish();
  run.simulation.validate();
  return run;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json simulation_to_json(const SimulationConfig& c) {
  const auto& g = c.geometry;
  const auto& m = c.materials;
  return json{
      {"geometry",
       {{"rod_length", g.rod_length},
        {"fuel_length", g.fuel_length},
        {"fuel_outer_radius", g.fuel_outer_radius},
        {"clad_inner_radius", g.clad_inner_radius},
        {"clad_outer_radius", g.clad_outer_radius},
        {"fuel_bottom", g.fuel_bottom}}},
      {"materials",
       {{"fuel_k_a", m.fuel_k_a},
        {"fuel_k_b", m.fuel_k_b},
        {"fuel_k_burnup", m.fuel_k_burnup},
        {"clad_k_a", m.clad_k_a},
        {"clad_k_b", m.clad_k_b},
        {"fuel_alpha", m.fuel_alpha},
        {"clad_alpha_hoop", m.clad_alpha_hoop},
        {"clad_alpha_axial", m.clad_alpha_axial},
        {"clad_youngs", m.clad_youngs},
        {"clad_poisson", m.clad_poisson},
        {"fuel_youngs", m.fuel_youngs},
        {"fuel_poisson", m.fuel_poisson},
        {"gap_conductance", m.gap_conductance},
        {"creep_coefficient", m.creep_coefficient},
        {"creep_exponent", m.creep_exponent},
        {"creep_activation", m.creep_activation},
        {"reference_temperature", m.reference_temperature}}},
      {"channel",
       {{"inlet_temperature", c.channel.inlet_temperature},
        {"outlet_pressure", c.channel.outlet_pressure},
        {"mass_flux", c.channel.mass_flux},
        {"pitch", c.channel.pitch}}},
      {"source", {{"extrapolation_length", c.extrapolation_length}}},
      {"mesh", {{"nr_fuel", c.mesh.nr_fuel}, {"nr_clad", c.mesh.nr_clad}, {"nz", c.mesh.nz}}},
      {"solver",
       {{"relaxation", c.coupling.relaxation},
        {"tolerance", c.coupling.tolerance},
        {"max_iterations", c.coupling.max_iterations},
        {"picard_tolerance", c.coupling.conduction.picard_tolerance},
        {"max_picard_iterations", c.coupling.conduction.max_picard_iterations}}},
      {"sensors",
       {{"z_fractions", c.sensors.z_fractions},
        {"eta", c.sensors.eta},
        {"coolant_reference",
         c.sensors.reference == CoolantReference::Inlet ? "inlet" : "local"}}},
  };
}

SimulationConfig simulation_from_json(const json& j) {
  SimulationConfig c;
  Section root(j, "config");
  read_simulation(root, c, nullptr);
  root.finish();
  c.validate();
  return c;
}

}  // namespace fuelrod
