// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fuelrod/channel.hpp"
#include "fuelrod/cli.hpp"
#include "fuelrod/conduction.hpp"
#include "fuelrod/error.hpp"
#include "fuelrod/io.hpp"
#include "fuelrod/khnet.hpp"
#include "fuelrod/metrics.hpp"
#include "fuelrod/pipeline.hpp"
#include "fuelrod/thermomech.hpp"
#include "fuelrod/train.hpp"

using namespace fuelrod;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kAc1Rel = 0.01;
constexpr double kAc2Rel = 0.005;
constexpr double kAc3Abs = 1e-3;
constexpr double kAc4Rel = 1e-5;
constexpr double kAc4Floor = 1e-10;
constexpr double kAc5R2 = 0.99;
constexpr double kAc5Overfit = 1.2;
constexpr double kAc6CaseR2 = 0.85;
constexpr double kAc6MeanR2 = 0.9;
constexpr double kAc6Nl2 = 0.1;
constexpr double kAc7ThermalRef = 0.0021429;
constexpr double kAc7ThermalRel = 0.10;
constexpr double kAc7TotalRef = 0.0022347;
constexpr double kAc7TotalRel = 0.25;
constexpr double kAc9Energy = 0.005;
constexpr double kAc9Order = 1.8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Drops {
  double fuel, clad;
};

Drops frozen_k_drops(std::size_t nr_fuel, std::size_t nr_clad) {
  RodGeometry g;
  g.fuel_bottom = 0.0;
  g.fuel_length = g.rod_length;
  MaterialParams m;
  m.fuel_k_a = 1.0 / 3.0;
  m.fuel_k_b = 0.0;
  m.clad_k_a = 17.0;
  m.clad_k_b = 0.0;
  const RodMesh mesh = build_rod_mesh(g, nr_fuel, 10, nr_clad);
  const auto bc = make_channel_boundary(583.15, 15.51e6, 3244.04, 0.0126, g);
  const auto coolant = isothermal_channel(mesh.clad_z(), bc, g);
  const auto src = VolumetricSource::uniform(mesh, 20.0e3, g.fuel_outer_radius);
  const auto t = assemble_and_solve_conduction(mesh, m, src, coolant, 0.0).field.temperature;
  return {t[mesh.fuel_node(5, 0)] - t[mesh.fuel_node(5, nr_fuel - 1)],
          t[mesh.clad_node(5, 0)] - t[mesh.clad_node(5, nr_clad - 1)]};
}

double clad_exact_drop() {
  const RodGeometry g;
  return 20.0e3 * std::log(g.clad_outer_radius / g.clad_inner_radius) / (2.0 * M_PI * 17.0);
}

Outcome ac1() {
  const double fuel_exact = 20.0e3 / (4.0 * M_PI * 3.0);
  const double clad_exact = clad_exact_drop();
  const Drops d = frozen_k_drops(64, 16);
  const double ef = rel(d.fuel, fuel_exact), ec = rel(d.clad, clad_exact);
  return {ef < kAc1Rel && ec < kAc1Rel,
          "fuel dT " + fmt(d.fuel) + " K vs " + fmt(fuel_exact) + " (rel " + fmt(ef) + "), clad dT " +
              fmt(d.clad) + " K vs " + fmt(clad_exact) + " (rel " + fmt(ec) + ")"};
}

double closed_form_outlet(const SimulationConfig& cfg, double peak) {
  const auto& bc = cfg.channel;
  const double power = total_rod_power(HeatSource{peak, cfg.extrapolation_length}, cfg.geometry);
  const double mdot = bc.mass_flux * bc.flow_area;
  double t = bc.inlet_temperature;
  for (int i = 0; i < 100; ++i) {
    const double cp = water_properties(0.5 * (bc.inlet_temperature + t), bc.outlet_pressure).specific_heat;
    t = bc.inlet_temperature + power / (mdot * cp);
  }
  return t;
}

Outcome ac2() {
  const SimulationConfig cfg;
  const auto sol = couple_rod_channel(CaseSpec{"ac2", 20.0e3, 0.0, Split::Test, cfg});
  const double expected = closed_form_outlet(cfg, 20.0e3);
  const double got = sol.channel.outlet_temperature();
  const double e = rel(got, expected);
  return {e < kAc2Rel, "T_out " + fmt(got) + " K vs closed form " + fmt(expected) + " K (rel " + fmt(e) + ")"};
}

Outcome ac3() {
  const std::size_t n = 256;
  const double ds = 2.0 * M_PI / static_cast<double>(n);
  auto u = [](double x, double y) { return x * x * x - 3.0 * x * y * y + x * x - y * y + 2.0 * y + 1.0; };
  auto dudn = [](double x, double y) { return 3.0 * (x * x * x - 3.0 * x * y * y) + 2.0 * (x * x - y * y) + 2.0 * y; };
  double worst = 0.0;
  const std::vector<double> w(n, ds);
  std::vector<double> phi(n);
  for (int ir = 0; ir <= 8; ++ir) {
    const double rad = 0.1 * ir;
    for (int ia = 0; ia < 16; ++ia) {
      const double px = rad * std::cos(M_PI * ia / 8.0), py = rad * std::sin(M_PI * ia / 8.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double th = ds * static_cast<double>(j);
        const double qx = std::cos(th), qy = std::sin(th);
        const double dx = qx - px, dy = qy - py, r2 = dx * dx + dy * dy;
        const double g = std::log(r2) / (4.0 * M_PI);
        const double dg = (dx * qx + dy * qy) / (2.0 * M_PI * r2);
        phi[j] = kh::kh_physical_layer(u(qx, qy), dudn(qx, qy), g, dg);
      }
      worst = std::max(worst, std::abs(kh::kh_integrate(phi, w) - u(px, py)));
    }
  }
  return {worst < kAc3Abs, "max |error| at r <= 0.8 over 144 points: " + fmt(worst)};
}

Outcome ac4() {
  const Normalization norm{0.0, 0.0047506, 0.0, 3.876, 583.15, 1300.0};
  const std::vector<double> sz{0.7752, 1.5504, 2.3256, 3.1008};
  double worst = 0.0;
  std::size_t checked = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    kh::KhModel m = kh::KhModel::create({128, 64}, norm, 1.0, 0.0047506, sz);
    m.initialize(seed);
    std::mt19937_64 rng(1000 + seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    kh::SensorInputs s;
    s.z = sz;
    s.radius = 0.0047506;
    s.weight = {1.16, 0.7752, 0.7752, 0.9376};
    for (int j = 0; j < 4; ++j) {
      s.u.push_back(d(rng));
      s.dudn.push_back(0.2 * d(rng));
    }
    std::vector<kh::Sample> batch;
    for (int i = 0; i < 8; ++i) batch.push_back({0.0024 * (1.0 + d(rng)), 1.9 + 1.8 * d(rng), d(rng), &s});
    kh::Workspace ws;
    std::vector<double> grad(m.params.size());
    kh::loss_and_gradients(m, batch, grad, ws, kh::Exec::Serial);
    auto loss = [&] {
      std::vector<double> p(batch.size()), t(batch.size());
      kh::predict_batch(m, batch, p, ws);
      for (std::size_t i = 0; i < batch.size(); ++i) t[i] = batch[i].truth;
      return kh::mse_loss(p, t);
    };
    // One kernel and one bias entry per layer of both stacks, the rest at random.
    std::vector<std::size_t> picks;
    for (const kh::StackLayout* st : {&m.green, &m.green_normal}) {
      for (std::size_t l = 0; l < st->layers(); ++l) {
        picks.push_back(st->kernel_offset[l] + (seed * 7) % (st->widths[l] * st->widths[l + 1]));
        picks.push_back(st->bias_offset[l] + (seed * 3) % st->widths[l + 1]);
      }
    }
    std::uniform_int_distribution<std::size_t> any(0, m.params.size() - 1);
    while (picks.size() < 20) picks.push_back(any(rng));
    for (std::size_t k : picks) {
      const double h = 1e-5 * std::max(1.0, std::abs(m.params[k]));
      const double saved = m.params[k];
      m.params[k] = saved + h;
      const double up = loss();
      m.params[k] = saved - h;
      const double down = loss();
      m.params[k] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max(std::abs(fd), std::abs(grad[k]));
      const double err = std::abs(fd - grad[k]);
      ++checked;
      if (err > kAc4Rel * scale + kAc4Floor) ++bad;
      if (scale > 0.0) worst = std::max(worst, err / scale);
    }
  }
  return {bad == 0, std::to_string(checked) + " parameters, " + std::to_string(bad) +
                        " outside tolerance, worst relative error " + fmt(worst)};
}

struct ReferenceRun {
  Dataset dataset;
  kh::TrainResult result;
  TemperatureField reconstructed;
  MetricsReport metrics;
};

std::optional<ReferenceRun> g_reference;

Outcome ac5() {
  const auto t0 = std::chrono::steady_clock::now();
  ReferenceRun run;
  const SimulationConfig cfg;
  run.dataset = generate_dataset(default_roster(cfg), 0);
  kh::TrainConfig tc;
  tc.seed = 0;
  run.result = kh::train(run.dataset, tc, [](std::size_t e, double a, double b) {
    if (e % 100 == 0) std::cerr << "  AC5 epoch " << e << " train " << a << " val " << b << '\n';
  });
  const CaseRecord* test = run.dataset.split(Split::Test).front();
  run.reconstructed = kh::reconstruct_field(run.result.model, test->sensors, test->solution.field.mesh);
  run.metrics = compare_fields(run.reconstructed, test->solution.field);
  const auto& h = run.result.history;
  const double ratio = h.val_mse.back() / h.train_mse.back();
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  Outcome o{run.metrics.r_squared >= kAc5R2 && ratio <= kAc5Overfit,
            "test q'0 = 20 kW/m R^2 " + fmt(run.metrics.r_squared) + ", NL2 " + fmt(run.metrics.nl2) +
                ", max |error| " + fmt(run.metrics.max_abs_error) + " K, final val/train MSE " +
                fmt(h.val_mse.back()) + "/" + fmt(h.train_mse.back()) + " = " + fmt(ratio) + ", " +
                fmt(minutes) + " min"};
  g_reference = std::move(run);
  return o;
}

Outcome ac6() {
  const auto t0 = std::chrono::steady_clock::now();
  const SimulationConfig cfg;
  BurnupSweepOptions opt;
  opt.n_cases = 30;
  const Dataset ds = burnup_sweep(cfg, opt);
  kh::TrainConfig tc;
  tc.epochs = 300;
  tc.schedule = kh::LrSchedule::constant(1e-3);
  tc.seed = 0;
  const auto r = kh::train(ds, tc, [](std::size_t e, double a, double b) {
    if (e % 100 == 0) std::cerr << "  AC6 epoch " << e << " train " << a << " val " << b << '\n';
  });
  double mean = 0.0, min_r2 = 1.0, max_nl2 = 0.0;
  std::size_t n = 0;
  for (const auto* c : ds.split(Split::Test)) {
    const auto rec = kh::reconstruct_field(r.model, c->sensors, c->solution.field.mesh);
    const auto m = compare_fields(rec, c->solution.field);
    mean += m.r_squared;
    min_r2 = std::min(min_r2, m.r_squared);
    max_nl2 = std::max(max_nl2, m.nl2);
    ++n;
  }
  mean /= static_cast<double>(n);
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  return {min_r2 >= kAc6CaseR2 && mean >= kAc6MeanR2 && max_nl2 <= kAc6Nl2,
          std::to_string(n) + " test cases, min R^2 " + fmt(min_r2) + ", mean R^2 " + fmt(mean) +
              ", max NL2 " + fmt(max_nl2) + ", " + fmt(minutes) + " min"};
}

Outcome ac7() {
  const MaterialParams m;
  const RodMesh mesh = build_rod_mesh(RodGeometry{}, 6, 20, 4);
  const TemperatureField at615{mesh, std::vector<double>(mesh.node_count(), 615.0)};
  const double thermal = thermal_expansion_strain(at615, m)[mesh.clad_node(0, 0)];

  TemperatureField field;
  std::string source;
  if (g_reference) {
    field = g_reference->reconstructed;
    source = "reconstructed test field";
  } else {
    const auto sol = couple_rod_channel(CaseSpec{"ac7", 20.0e3, 0.0, Split::Test, SimulationConfig{}});
    field = sol.field;
    source = "simulated test field";
  }
  const StrainReport rep = hoop_strain_summary(field, m, 5.26e7);
  const bool thermal_ok = rel(thermal, kAc7ThermalRef) <= kAc7ThermalRel;
  const bool total_ok = rel(rep.total, kAc7TotalRef) <= kAc7TotalRel;
  const bool order_ok = std::abs(rep.thermal) > std::abs(rep.creep) &&
                        std::abs(rep.thermal) > std::abs(rep.elastic);
  return {thermal_ok && total_ok && order_ok,
          "thermal at 615 K " + fmt(thermal) + " vs " + fmt(kAc7ThermalRef) + "; " + source +
              ": thermal " + fmt(rep.thermal) + ", creep " + fmt(rep.creep) + ", elastic " +
              fmt(rep.elastic) + ", total " + fmt(rep.total) + " vs " + fmt(kAc7TotalRef) + " (rel " +
              fmt(rel(rep.total, kAc7TotalRef)) + "), ordering " + (order_ok ? "holds" : "violated")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Relative path -> bytes for every regular file under dir.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome ac8(const fs::path& work) {
  const fs::path root = work / "ac8";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({"mesh": {"nr_fuel": 5, "nr_clad": 3, "nz": 30},
    "training": {"epochs": 3, "hidden": [32, 16]}})";
  std::vector<std::map<std::string, std::string>> snaps;
  for (const char* tag : {"a", "b"}) {
    const fs::path d = root / tag;
    fs::create_directories(d / "train");
    if (cli({"generate", "--config", cfg.string(), "--seed", "11", "--out-dir", (d / "dataset").string(),
             "--quiet"}) != 0 ||
        cli({"train", "--config", cfg.string(), "--seed", "11", "--dataset", (d / "dataset").string(),
             "--out-dir", (d / "train").string(), "--quiet"}) != 0) {
      return {false, "CLI run failed"};
    }
    snaps.push_back(snapshot(d));
  }
  const bool same = snaps[0] == snaps[1];
  return {same && !snaps[0].empty(),
          std::to_string(snaps[0].size()) + " files per run, " + (same ? "byte-identical" : "outputs differ")};
}

Outcome ac9(const fs::path& work) {
  std::vector<std::string> notes;
  bool ok = true;

  // Energy conservation: wall heat vs rod power, and coolant enthalpy rise vs wall heat.
  const SimulationConfig cfg;
  const auto sol = couple_rod_channel(CaseSpec{"ac9", 20.0e3, 0.0, Split::Test, cfg});
  const auto flux = wall_heat_flux(sol.field, sol.channel);
  const auto z = sol.field.mesh.clad_z();
  double wall = 0.0;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) wall += 0.5 * (flux[k] + flux[k + 1]) * (z[k + 1] - z[k]);
  wall *= 2.0 * M_PI * cfg.geometry.clad_outer_radius;
  const double power = total_rod_power(HeatSource{20.0e3, cfg.extrapolation_length}, cfg.geometry);
  double enthalpy = 0.0;
  const auto& ch = sol.channel;
  for (std::size_t k = 0; k + 1 < ch.size(); ++k) {
    const double tm = 0.5 * (ch.temperature[k] + ch.temperature[k + 1]);
    enthalpy += water_properties(tm, cfg.channel.outlet_pressure).specific_heat *
                (ch.temperature[k + 1] - ch.temperature[k]);
  }
  enthalpy *= cfg.channel.mass_flux * cfg.channel.flow_area;
  const double e_rod = rel(wall, power), e_chan = rel(enthalpy, wall);
  ok = ok && e_rod <= kAc9Energy && e_chan <= kAc9Energy;
  notes.push_back("energy rod " + fmt(e_rod) + " channel " + fmt(e_chan));

  // Picard monotonicity for the coupling loop and the conductivity loop.
  bool mono = !sol.residuals.empty();
  for (std::size_t i = 1; i < sol.residuals.size(); ++i) mono = mono && sol.residuals[i] <= sol.residuals[i - 1];
  const auto q3 = VolumetricSource::from_heat_source(sol.field.mesh, HeatSource{30.0e3, 0.08}, cfg.geometry);
  const auto cond = assemble_and_solve_conduction(sol.field.mesh, cfg.materials, q3, sol.channel, 40.0);
  for (std::size_t i = 1; i < cond.residuals.size(); ++i) mono = mono && cond.residuals[i] <= cond.residuals[i - 1];
  ok = ok && mono;
  notes.push_back(std::string("Picard ") + (mono ? "monotone" : "non-monotone"));

  // Mesh convergence of the analytic cladding drop.
  const double exact = clad_exact_drop();
  const double e1 = std::abs(frozen_k_drops(11, 3).clad - exact);
  const double e2 = std::abs(frozen_k_drops(11, 5).clad - exact);
  const double e3 = std::abs(frozen_k_drops(11, 9).clad - exact);
  const double order = std::min(std::log2(e1 / e2), std::log2(e2 / e3));
  ok = ok && order >= kAc9Order;
  notes.push_back("order " + fmt(order));

  // Learning-rate schedule.
  bool lr_ok = true;
  const kh::LrSchedule sched;
  for (std::size_t e = 0; e < 1200; ++e) {
    const double want = e < 300 ? 1e-3 : e < 600 ? 1e-4 : e < 900 ? 1e-5 : 1e-6;
    lr_ok = lr_ok && kh::lr_schedule(e) == want && sched.at(e) == want;
  }
  ok = ok && lr_ok;
  notes.push_back(std::string("LR ") + (lr_ok ? "exact" : "mismatch"));

  // Checkpoint round trip.
  kh::KhModel m = g_reference ? g_reference->result.model
                          : kh::KhModel::create({128, 64}, Normalization{0.0, 0.0047506, 0.0, 3.876, 583.15, 1300.0},
                                                1.0, 0.0047506, {0.7752, 1.5504, 2.3256, 3.1008});
  if (!g_reference) m.initialize(9);
  fs::create_directories(work);
  io::save_checkpoint(work / "ac9_checkpoint.json", m);
  const kh::KhModel back = io::load_checkpoint(work / "ac9_checkpoint.json");
  const bool ck = back.params == m.params && back.normalization == m.normalization &&
                  back.sensor_z == m.sensor_z && back.eta == m.eta;
  ok = ok && ck;
  notes.push_back(std::string("checkpoint ") + (ck ? "bit-exact" : "mismatch"));

  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria AC1-AC9"};
  std::string work = "acceptance_work";
  std::vector<std::string> only;
  app.add_option("--work-dir", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria (e.g. AC1 AC7)");
  CLI11_PARSE(app, argc, argv);

  const fs::path dir = work;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1},
      {"AC2", ac2},
      {"AC3", ac3},
      {"AC4", ac4},
      {"AC5", ac5},
      {"AC6", ac6},
      {"AC7", ac7},
      {"AC8", [&] { return ac8(dir); }},
      {"AC9", [&] { return ac9(dir); }},
  };
  const std::set<std::string> selected(only.begin(), only.end());
  fs::create_directories(dir);
  std::ofstream results(dir / "results.txt");
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!selected.empty() && !selected.count(name)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const std::string line = name + (o.pass ? " PASS " : " FAIL ") + o.detail;
    std::cout << line << std::endl;
    results << line << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
