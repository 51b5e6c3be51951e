#include "fuelrod/cli.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "fuelrod/config.hpp"
#include "fuelrod/error.hpp"
#include "fuelrod/io.hpp"
#include "fuelrod/khnet.hpp"
#include "fuelrod/metrics.hpp"
#include "fuelrod/thermomech.hpp"
#include "fuelrod/train.hpp"

namespace fuelrod {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string dataset;
  std::string checkpoint;
  std::string sensors;
  std::string truth;
  std::string field;
  std::string predicted;
  bool quiet = false;
};

RunConfig config_of(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) c.apply_seed(*o.seed);
  return c;
}

void report_progress(std::ostream& err, bool quiet, std::size_t epoch, std::size_t epochs,
                     double train_mse, double val_mse) {
  if (quiet || (epoch % 100 != 0 && epoch + 1 != epochs)) return;
  err << "epoch " << epoch << " train_mse " << io::format_double(train_mse) << " val_mse "
      << io::format_double(val_mse) << '\n';
}

json run_simulate(const Options& o) {
  const RunConfig cfg = config_of(o);
  CaseSpec spec;
  spec.id = "case";
  spec.peak_linear_rate = cfg.peak_linear_rate;
  spec.burnup = cfg.burnup;
  spec.split = Split::Test;
  spec.config = cfg.simulation;
  const CoupledSolution sol = couple_rod_channel(spec);
  std::vector<double> z;
  for (double f : cfg.simulation.sensors.z_fractions) z.push_back(f * cfg.simulation.geometry.rod_length);
  const SensorSet sensors = extract_sensors(sol, z, cfg.simulation.sensors.eta, cfg.simulation);
  const fs::path dir = o.out_dir;
  io::write_field_csv(dir / "field.csv", sol.field);
  io::write_channel_csv(dir / "channel.csv", sol.channel);
  io::write_sensors_csv(dir / "sensors.csv", sensors);
  const auto [tmin, tmax] =
      std::minmax_element(sol.field.temperature.begin(), sol.field.temperature.end());
  return {{"coupling_iterations", sol.iterations},
          {"coupling_residual", sol.residual},
          {"outlet_temperature", sol.channel.outlet_temperature()},
          {"t_min", *tmin},
          {"t_max", *tmax},
          {"nodes", sol.field.mesh.node_count()}};
}

json run_generate(const Options& o) {
  const RunConfig cfg = config_of(o);
  const Dataset ds = generate_dataset(cfg.roster(), cfg.seed);
  io::write_dataset(o.out_dir, ds);
  return {{"cases", ds.cases.size()},
          {"normalization", io::to_json(ds.normalization)},
          {"dataset", o.out_dir}};
}

kh::TrainResult train_and_save(const Dataset& ds, const kh::TrainConfig& tc, const fs::path& dir,
                               std::ostream& err, bool quiet) {
  auto result = kh::train(ds, tc, [&](std::size_t e, double a, double b) {
    report_progress(err, quiet, e, tc.epochs, a, b);
  });
  io::save_checkpoint(dir / "checkpoint.json", result.model);
  io::write_history_csv(dir / "history.csv", result.history);
  return result;
}

json train_summary(const kh::TrainResult& r) {
  const auto& h = r.history;
  return {{"epochs", h.train_mse.size()},
          {"initial_train_mse", h.initial_train_mse},
          {"final_train_mse", h.train_mse.back()},
          {"final_val_mse", h.val_mse.back()},
          {"best_epoch", h.best_epoch},
          {"best_val_mse", h.val_mse[h.best_epoch]},
          {"wall_time", h.wall_time}};
}

json run_train(const Options& o, std::ostream& err) {
  if (o.dataset.empty()) fail(ErrorKind::Usage, "train: --dataset is required");
  const RunConfig cfg = config_of(o);
  const Dataset ds = io::read_dataset(o.dataset);
  const auto r = train_and_save(ds, cfg.training, o.out_dir, err, o.quiet);
  return train_summary(r);
}

json run_reconstruct(const Options& o) {
  if (o.checkpoint.empty() || o.sensors.empty()) {
    fail(ErrorKind::Usage, "reconstruct: --checkpoint and --sensors are required");
  }
  const RunConfig cfg = config_of(o);
  const kh::KhModel model = io::load_checkpoint(o.checkpoint);
  const SensorSet sensors = io::read_sensors_csv(o.sensors);
  std::optional<TemperatureField> truth;
  RodMesh mesh;
  if (!o.truth.empty()) {
    truth = io::read_field_csv(o.truth);
    mesh = truth->mesh;
  } else {
    const auto& m = cfg.simulation.mesh;
    mesh = build_rod_mesh(cfg.simulation.geometry, m.nr_fuel, m.nz, m.nr_clad);
  }
  const TemperatureField rec = kh::reconstruct_field(model, sensors, mesh);
  io::write_field_csv(fs::path(o.out_dir) / "field.csv", rec);
  json out = {{"nodes", mesh.node_count()}};
  if (truth) {
    const json metrics = io::to_json(compare_fields(rec, *truth));
    io::write_json(fs::path(o.out_dir) / "metrics.json", metrics);
    out["metrics"] = metrics;
  }
  return out;
}

json run_strain(const Options& o) {
  if (o.field.empty()) fail(ErrorKind::Usage, "strain: --field is required");
  const RunConfig cfg = config_of(o);
  const TemperatureField field = io::read_field_csv(o.field);
  const auto& m = cfg.simulation.materials;
  const StrainReport rep = hoop_strain_summary(field, m, cfg.strain.creep_duration, cfg.strain.loads);
  const StressField stress = stress_field(field, cfg.strain.loads, m);
  const fs::path dir = o.out_dir;
  const json j = io::to_json(rep);
  io::write_json(dir / "strain.json", j);
  io::write_stress_csv(dir / "stress.csv", stress, Region::Cladding);
  io::write_stress_csv(dir / "stress_fuel.csv", stress, Region::Fuel);
  return j;
}

json run_evaluate(const Options& o) {
  if (o.predicted.empty() || o.truth.empty()) {
    fail(ErrorKind::Usage, "evaluate: expected <predicted.csv> <truth.csv>");
  }
  const TemperatureField p = io::read_field_csv(o.predicted);
  const TemperatureField t = io::read_field_csv(o.truth);
  const json j = io::to_json(compare_fields(p, t));
  if (o.out_dir != ".") io::write_json(fs::path(o.out_dir) / "metrics.json", j);
  return j;
}

json run_sweep(const Options& o, std::ostream& err) {
  const RunConfig cfg = config_of(o);
  const Dataset ds = burnup_sweep(cfg.simulation, cfg.sweep);
  const fs::path dir = o.out_dir;
  io::write_dataset(dir / "dataset", ds);
  const auto r = train_and_save(ds, cfg.training, dir, err, o.quiet);
  json cases = json::array();
  double mean_r2 = 0.0;
  std::size_t n = 0;
  for (const auto* c : ds.split(Split::Test)) {
    const TemperatureField rec = kh::reconstruct_field(r.model, c->sensors, c->solution.field.mesh);
    const MetricsReport m = compare_fields(rec, c->solution.field);
    cases.push_back({{"id", c->spec.id}, {"burnup", c->spec.burnup}, {"r_squared", m.r_squared},
                     {"nl2", m.nl2}, {"max_abs_error", m.max_abs_error}});
    mean_r2 += m.r_squared;
    ++n;
  }
  json out = {{"training", train_summary(r)},
              {"test_cases", cases},
              {"mean_r_squared", n ? mean_r2 / static_cast<double>(n) : 0.0}};
  io::write_json(dir / "sweep.json", out);
  return out;
}

void write_error(std::ostream& err, ErrorKind kind, const std::string& message) {
  err << json{{"error", to_string(kind)}, {"message", message}, {"exit_code", exit_code(kind)}}.dump()
      << '\n';
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PWR fuel-rod digital twin: coupled simulation, Kirchhoff-Helmholtz "
               "field reconstruction and cladding strain"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--seed", o.seed, "Seed for dataset, training and sweep");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
    sub->add_flag("--quiet", o.quiet, "Suppress progress output");
  };
  auto* simulate = app.add_subcommand("simulate", "Run one coupled case");
  auto* generate = app.add_subcommand("generate", "Generate a dataset from a case roster");
  auto* train = app.add_subcommand("train", "Train the reconstruction network");
  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct a field from sensors");
  auto* strain = app.add_subcommand("strain", "Cladding hoop strain and stresses");
  auto* evaluate = app.add_subcommand("evaluate", "Compare two field CSVs");
  auto* sweep = app.add_subcommand("sweep-burnup", "Burnup sweep: generate, train, evaluate");
  for (auto* s : {simulate, generate, train, reconstruct, strain, evaluate, sweep}) common(s);
  train->add_option("--dataset", o.dataset, "Dataset directory")->required();
  reconstruct->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON")->required();
  reconstruct->add_option("--sensors", o.sensors, "Sensor CSV")->required();
  reconstruct->add_option("--truth", o.truth, "Ground-truth field CSV (mesh and metrics)");
  strain->add_option("--field", o.field, "Temperature field CSV")->required();
  evaluate->add_option("predicted", o.predicted, "Predicted field CSV")->required();
  evaluate->add_option("truth", o.truth, "Ground-truth field CSV")->required();

  std::vector<std::string> argv_storage{"fuelrod"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, ErrorKind::Usage, e.what());
    return exit_code(ErrorKind::Usage);
  }

  try {
    json result;
    if (simulate->parsed()) result = run_simulate(o);
    else if (generate->parsed()) result = run_generate(o);
    else if (train->parsed()) result = run_train(o, err);
    else if (reconstruct->parsed()) result = run_reconstruct(o);
    else if (strain->parsed()) result = run_strain(o);
    else if (evaluate->parsed()) result = run_evaluate(o);
    else result = run_sweep(o, err);
    out << result.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    write_error(err, e.kind(), e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    write_error(err, ErrorKind::Io, e.what());
    return exit_code(ErrorKind::Io);
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}, {"exit_code", 1}}.dump() << '\n';
    return 1;
  }
}

int cli_run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_run(args, std::cout, std::cerr);
}

}  // namespace fuelrod
