#include "fuelrod/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod {

void SimulationConfig::validate() const {
  geometry.validate();
  materials.validate();
  channel.validate(geometry);
  if (!(extrapolation_length >= 0.0)) fail(ErrorKind::Config, "source: delta_e must be >= 0");
  if (mesh.nr_fuel < 3 || mesh.nz < 10 || mesh.nr_clad < 2) {
    fail(ErrorKind::Config, "mesh: require nr_fuel >= 3, nr_clad >= 2, nz >= 10");
  }
  if (!(coupling.relaxation > 0.0 && coupling.relaxation <= 1.0)) {
    fail(ErrorKind::Config, "coupling: relaxation must lie in (0, 1]");
  }
  if (coupling.max_iterations < 1 || coupling.conduction.max_picard_iterations < 1) {
    fail(ErrorKind::Config, "coupling: iteration caps must be positive");
  }
  if (sensors.z_fractions.size() < 2) fail(ErrorKind::Config, "sensors: need at least 2 sensors");
  if (!(sensors.eta >= 0.0)) fail(ErrorKind::Config, "sensors: eta must be >= 0");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validate: return "validate";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "validate") return Split::Validate;
  if (text == "test") return Split::Test;
  fail(ErrorKind::Config, "unknown split label '" + std::string(text) + "'");
}

void CaseSpec::validate() const {
  if (id.empty()) fail(ErrorKind::Config, "case: empty id");
  const bool isothermal = peak_linear_rate == 0.0;
  if (!isothermal && !(peak_linear_rate >= 5.0e3 && peak_linear_rate <= 45.0e3)) {
    fail(ErrorKind::Config, "case " + id + ": q'_0 must be 0 or within [5, 45] kW/m");
  }
  if (!(burnup >= 0.0 && burnup <= kBurnupValidityMax)) {
    fail(ErrorKind::Config, "case " + id + ": burnup outside [0, 80] MWd/kgU");
  }
  config.validate();
}

std::vector<const CaseRecord*> Dataset::split(Split which) const {
  std::vector<const CaseRecord*> out;
  for (const auto& c : cases) {
    if (c.spec.split == which) out.push_back(&c);
  }
  return out;
}

CoupledSolution couple_rod_channel(const CaseSpec& spec) {
  spec.validate();
  const auto& cfg = spec.config;
  const auto& geom = cfg.geometry;
  const RodMesh mesh = build_rod_mesh(geom, cfg.mesh.nr_fuel, cfg.mesh.nz, cfg.mesh.nr_clad);
  const HeatSource source{spec.peak_linear_rate, cfg.extrapolation_length};
  const auto q3 = VolumetricSource::from_heat_source(mesh, source, geom);
  const auto zc = mesh.clad_z();
  const auto outer = mesh.clad_outer_nodes();

  ChannelState coolant = isothermal_channel(zc, cfg.channel, geom);
  std::vector<double> wall_prev;
  CoupledSolution out;
  for (int it = 1; it <= cfg.coupling.max_iterations; ++it) {
    auto rod = assemble_and_solve_conduction(mesh, cfg.materials, q3, coolant, spec.burnup,
                                             cfg.coupling.conduction);
    std::vector<double> wall(outer.size());
    for (std::size_t k = 0; k < outer.size(); ++k) wall[k] = rod.field.temperature[outer[k]];
    const auto flux = wall_heat_flux(rod.field, coolant);
    if (!wall_prev.empty()) {
      double change = 0.0;
      for (std::size_t k = 0; k < wall.size(); ++k) {
        change = std::max(change, std::abs(wall[k] - wall_prev[k]));
      }
      out.residuals.push_back(change);
      if (change < cfg.coupling.tolerance) {
        out.field = std::move(rod.field);
        // Report the coolant that carries the converged wall heat.
        out.channel = solve_channel(zc, flux, cfg.channel, geom);
        out.iterations = it;
        out.residual = change;
        return out;
      }
    }
    wall_prev = std::move(wall);

    const ChannelState fresh = solve_channel(zc, flux, cfg.channel, geom);
    std::vector<double> relaxed(zc.size());
    for (std::size_t k = 0; k < zc.size(); ++k) {
      relaxed[k] = coolant.temperature[k] +
                   cfg.coupling.relaxation * (fresh.temperature[k] - coolant.temperature[k]);
    }
    coolant = channel_from_temperature(zc, relaxed, cfg.channel, geom);
  }
  std::ostringstream os;
  os << "case " << spec.id << ": rod/channel coupling did not converge in "
     << cfg.coupling.max_iterations << " iterations";
  if (!out.residuals.empty()) os << " (last residual " << out.residuals.back() << " K)";
  throw SolverError(os.str(), out.residuals);
}

std::vector<double> voronoi_weights(std::span<const double> z, double lo, double hi) {
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return z[a] < z[b]; });
  std::vector<double> w(z.size(), 0.0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    double a = k == 0 ? lo : 0.5 * (z[order[k - 1]] + z[order[k]]);
    double b = k + 1 == order.size() ? hi : 0.5 * (z[order[k]] + z[order[k + 1]]);
    a = std::clamp(a, lo, hi);
    b = std::clamp(b, lo, hi);
    w[order[k]] = std::max(0.0, b - a);
  }
  return w;
}

SensorSet extract_sensors(const CoupledSolution& solution, std::span<const double> z_locations,
                          double eta, const SimulationConfig& config) {
  const auto& mesh = solution.field.mesh;
  const auto zc = mesh.clad_z();
  const auto outer = mesh.clad_outer_nodes();
  std::vector<double> wall(outer.size());
  for (std::size_t k = 0; k < outer.size(); ++k) wall[k] = solution.field.temperature[outer[k]];

  SensorSet s;
  s.radius = mesh.clad_r().back();
  s.eta = eta;
  for (double z : z_locations) {
    if (!(z >= zc.front() && z <= zc.back())) {
      std::ostringstream os;
      os << "extract_sensors: z = " << z << " m is off the cladding outer boundary";
      fail(ErrorKind::Domain, os.str());
    }
    const double t = interpolate(zc, wall, z);
    const double t_inf = config.sensors.reference == CoolantReference::Inlet
                             ? config.channel.inlet_temperature
                             : interpolate(solution.channel.z, solution.channel.temperature, z);
    s.z.push_back(z);
    s.temperature.push_back(t);
    s.coolant_reference.push_back(t_inf);
    s.normal_derivative.push_back(-eta * (t - t_inf));
  }
  s.weight = voronoi_weights(s.z, config.geometry.fuel_bottom, config.geometry.fuel_top());
  return s;
}

Normalization compute_normalization(std::span<const CaseRecord* const> training) {
  if (training.empty()) fail(ErrorKind::Config, "normalization: no training cases");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Normalization n{inf, -inf, inf, -inf, inf, -inf};
  for (const CaseRecord* c : training) {
    const auto& f = c->solution.field;
    for (std::size_t i = 0; i < f.mesh.node_count(); ++i) {
      n.r_min = std::min(n.r_min, f.mesh.node_r(i));
      n.r_max = std::max(n.r_max, f.mesh.node_r(i));
      n.z_min = std::min(n.z_min, f.mesh.node_z(i));
      n.z_max = std::max(n.z_max, f.mesh.node_z(i));
      n.t_min = std::min(n.t_min, f.temperature[i]);
      n.t_max = std::max(n.t_max, f.temperature[i]);
    }
  }
  // A uniform training field (isothermal cases) still needs a finite scale.
  if (n.t_max - n.t_min < 1e-9) {
    n.t_min -= 0.5;
    n.t_max += 0.5;
  }
  return n;
}

Dataset generate_dataset(std::span<const CaseSpec> specs, std::uint64_t seed) {
  if (specs.empty()) fail(ErrorKind::Config, "generate_dataset: empty roster");
  if (std::none_of(specs.begin(), specs.end(), [](const auto& s) { return s.split == Split::Test; })) {
    fail(ErrorKind::Config, "generate_dataset: roster needs at least one test case");
  }
  if (std::none_of(specs.begin(), specs.end(), [](const auto& s) { return s.split == Split::Train; })) {
    fail(ErrorKind::Config, "generate_dataset: roster needs at least one training case");
  }
  std::vector<CaseSpec> sorted(specs.begin(), specs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].id == sorted[i - 1].id) fail(ErrorKind::Config, "duplicate case id " + sorted[i].id);
  }

  const auto n = static_cast<std::ptrdiff_t>(sorted.size());
  std::vector<CaseRecord> records(sorted.size());
  std::vector<std::exception_ptr> errors(sorted.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& spec = sorted[static_cast<std::size_t>(i)];
    try {
      auto& rec = records[static_cast<std::size_t>(i)];
      rec.spec = spec;
      rec.solution = couple_rod_channel(spec);
      std::vector<double> z;
      for (double f : spec.config.sensors.z_fractions) z.push_back(f * spec.config.geometry.rod_length);
      rec.sensors = extract_sensors(rec.solution, z, spec.config.sensors.eta, spec.config);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "case " + sorted[i].id + " failed: " + e.what());
    }
  }

  Dataset ds;
  ds.cases = std::move(records);
  ds.seed = seed;
  const auto train = ds.split(Split::Train);
  ds.normalization = compute_normalization(train);
  return ds;
}

std::vector<CaseSpec> default_roster(const SimulationConfig& config, bool exclude_duplicates) {
  struct Entry {
    double kw;
    Split split;
  };
  std::vector<Entry> entries;
  for (double kw : {10.0, 12.0, 16.0, 18.0, 22.0, 24.0, 30.0, 36.0}) entries.push_back({kw, Split::Train});
  for (double kw : {14.0, 16.0}) {
    if (exclude_duplicates && kw == 16.0) continue;
    entries.push_back({kw, Split::Validate});
  }
  entries.push_back({20.0, Split::Test});

  std::vector<CaseSpec> specs;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CaseSpec s;
    std::ostringstream id;
    id << "case_" << (i < 10 ? "0" : "") << i;
    s.id = id.str();
    s.peak_linear_rate = entries[i].kw * 1.0e3;
    s.split = entries[i].split;
    s.config = config;
    specs.push_back(std::move(s));
  }
  return specs;
}

std::vector<CaseSpec> burnup_sweep_specs(const SimulationConfig& config,
                                         const BurnupSweepOptions& options) {
  if (options.n_cases < 10) fail(ErrorKind::Config, "burnup_sweep: need at least 10 cases");
  if (!(options.burnup_min >= 0.0 && options.burnup_max <= kBurnupValidityMax &&
        options.burnup_min < options.burnup_max)) {
    fail(ErrorKind::Config, "burnup_sweep: burnup range must lie inside [0, 80] MWd/kgU");
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> draw(options.burnup_min, options.burnup_max);
  std::vector<double> burnups(options.n_cases);
  for (auto& b : burnups) b = draw(rng);

  std::vector<std::size_t> order(options.n_cases);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n = static_cast<double>(options.n_cases);
  const auto n_train = static_cast<std::size_t>(std::lround(0.6 * n));
  const auto n_val = static_cast<std::size_t>(std::lround(0.2 * n));
  std::vector<Split> splits(options.n_cases, Split::Test);
  for (std::size_t k = 0; k < options.n_cases; ++k) {
    splits[order[k]] = k < n_train ? Split::Train : (k < n_train + n_val ? Split::Validate : Split::Test);
  }

  std::vector<CaseSpec> specs;
  for (std::size_t i = 0; i < options.n_cases; ++i) {
    CaseSpec s;
    std::ostringstream id;
    id << "bu_";
    id.width(3);
    id.fill('0');
    id << i;
    s.id = id.str();
    s.peak_linear_rate = options.peak_linear_rate;
    s.burnup = burnups[i];
    s.split = splits[i];
    s.config = config;
    specs.push_back(std::move(s));
  }
  return specs;
}

Dataset burnup_sweep(const SimulationConfig& config, const BurnupSweepOptions& options) {
  const auto specs = burnup_sweep_specs(config, options);
  return generate_dataset(specs, options.seed);
}

}  // namespace fuelrod
