#include "fuelrod/khnet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod::kh {

namespace {

double to_unit(double x, double lo, double hi) { return 2.0 * (x - lo) / (hi - lo) - 1.0; }

std::span<const double> kernel_of(const StackLayout& s, std::span<const double> p, std::size_t l) {
  return p.subspan(s.kernel_offset[l], s.widths[l] * s.widths[l + 1]);
}

std::span<const double> bias_of(const StackLayout& s, std::span<const double> p, std::size_t l) {
  return p.subspan(s.bias_offset[l], s.widths[l + 1]);
}

kernels::ConstView kernel_view(const StackLayout& s, std::span<const double> p, std::size_t l) {
  return {kernel_of(s, p, l).data(), s.widths[l], s.widths[l + 1]};
}

void prepare(Workspace::StackCache& c, const StackLayout& s, std::span<const double> p,
             std::size_t rows, bool backward) {
  const std::size_t n = s.layers();
  c.act.resize(n + 1);
  for (std::size_t l = 0; l <= n; ++l) c.act[l].resize(rows, s.widths[l]);
  if (!backward) return;
  c.delta.resize(n);
  c.kernel_t.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    c.delta[l].resize(rows, s.widths[l + 1]);
    if (l == 0) continue;  // input gradients are not needed for the first layer
    c.kernel_t[l].resize(s.widths[l + 1], s.widths[l]);
    kernels::transpose(kernel_view(s, p, l), c.kernel_t[l].view());
  }
}

void stack_forward(Exec exec, Workspace::StackCache& c, const StackLayout& s,
                   std::span<const double> p) {
  const std::size_t n = s.layers();
  for (std::size_t l = 0; l < n; ++l) {
    kernels::dense_forward(exec, c.act[l].cview(), kernel_view(s, p, l), bias_of(s, p, l),
                           c.act[l + 1].view(), l + 1 < n);
  }
}

// Expects c.delta.back() to hold dL/d(output); fills the stack's slice of grad.
void stack_backward(Exec exec, Workspace::StackCache& c, const StackLayout& s,
                    std::span<double> grad) {
  for (std::size_t l = s.layers(); l-- > 0;) {
    kernels::View dk{grad.data() + s.kernel_offset[l], s.widths[l], s.widths[l + 1]};
    kernels::dense_backward_params(exec, c.act[l].cview(), c.delta[l].cview(), dk,
                                   grad.subspan(s.bias_offset[l], s.widths[l + 1]));
    if (l == 0) break;
    kernels::dense_backward_input(exec, c.delta[l].cview(), c.kernel_t[l].cview(),
                                  c.delta[l - 1].view());
    kernels::tanh_backward(exec, c.act[l].cview(), c.delta[l - 1].view());
  }
}

// Fills features and the per-row sensor terms; returns the number of rows.
std::size_t load_batch(const KhModel& model, std::span<const Sample> batch, Workspace& ws) {
  std::size_t rows = 0;
  for (const auto& s : batch) rows += s.sensors->z.size();
  ws.features.resize(rows, kFeatureCount);
  ws.u.resize(rows);
  ws.dudn.resize(rows);
  ws.weight.resize(rows);
  std::size_t row = 0;
  for (const auto& s : batch) {
    const auto& sens = *s.sensors;
    for (std::size_t j = 0; j < sens.z.size(); ++j, ++row) {
      const Features f = boundary_features(s.r, s.z, sens.radius, sens.z[j], model.normalization);
      std::copy(f.begin(), f.end(), ws.features.view().row(row));
      ws.u[row] = sens.u[j];
      ws.dudn[row] = sens.dudn[j];
      ws.weight[row] = sens.weight[j];
    }
  }
  return rows;
}

void forward(const KhModel& model, std::span<const Sample> batch, std::span<double> out,
             Workspace& ws, Exec exec, bool backward) {
  const std::size_t rows = load_batch(model, batch, ws);
  const std::span<const double> p = model.params;
  for (auto* pair : {&ws.green, &ws.green_normal}) {
    const StackLayout& s = pair == &ws.green ? model.green : model.green_normal;
    prepare(*pair, s, p, rows, backward);
    std::copy(ws.features.data.begin(), ws.features.data.end(), pair->act[0].data.begin());
    stack_forward(exec, *pair, s, p);
  }
  const auto& g = ws.green.act.back().data;
  const auto& dg = ws.green_normal.act.back().data;
  std::size_t row = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < batch[b].sensors->z.size(); ++j, ++row) {
      acc += ws.weight[row] * kh_physical_layer(ws.u[row], ws.dudn[row], g[row], dg[row]);
    }
    out[b] = acc;
  }
}

constexpr std::size_t kPredictChunk = 256;

}  // namespace

Features boundary_features(double r, double z, double sensor_r, double sensor_z,
                           const Normalization& norm) {
  const double z_span = norm.z_max - norm.z_min;
  const double rho_scale = std::hypot(kRadialStretch * (norm.r_max - norm.r_min), z_span);
  const double rho = std::hypot(kRadialStretch * (r - sensor_r), z - sensor_z);
  return {to_unit(r, norm.r_min, norm.r_max), to_unit(z, norm.z_min, norm.z_max),
          to_unit(sensor_z, norm.z_min, norm.z_max), (z - sensor_z) / z_span, rho / rho_scale};
}

StackLayout StackLayout::make(std::vector<std::size_t> widths, std::size_t begin) {
  StackLayout s;
  s.widths = std::move(widths);
  s.begin = begin;
  std::size_t at = begin;
  for (std::size_t l = 0; l + 1 < s.widths.size(); ++l) {
    s.kernel_offset.push_back(at);
    at += s.widths[l] * s.widths[l + 1];
    s.bias_offset.push_back(at);
    at += s.widths[l + 1];
  }
  s.size = at - begin;
  return s;
}

KhModel KhModel::create(std::vector<std::size_t> hidden, const Normalization& norm, double eta,
                        double sensor_radius, std::vector<double> sensor_z) {
  KhModel m;
  m.hidden = std::move(hidden);
  m.normalization = norm;
  m.eta = eta;
  m.sensor_radius = sensor_radius;
  m.sensor_z = std::move(sensor_z);
  const auto w = m.widths();
  m.green = StackLayout::make(w, 0);
  m.green_normal = StackLayout::make(w, m.green.size);
  m.params.assign(m.green.size + m.green_normal.size, 0.0);
  m.validate();
  return m;
}

std::vector<std::size_t> KhModel::widths() const {
  std::vector<std::size_t> w{kFeatureCount};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

void KhModel::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const StackLayout* s : {&green, &green_normal}) {
    for (std::size_t l = 0; l < s->layers(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(s->widths[l]));
      std::uniform_real_distribution<double> dist(-bound, bound);
      const std::size_t end = s->bias_offset[l] + s->widths[l + 1];
      for (std::size_t k = s->kernel_offset[l]; k < end; ++k) params[k] = dist(rng);
    }
  }
}

void KhModel::validate() const {
  if (hidden.empty()) fail(ErrorKind::Structural, "KhModel: at least one hidden layer required");
  for (auto h : hidden) {
    if (h == 0) fail(ErrorKind::Structural, "KhModel: hidden layer of width 0");
  }
  const auto w = widths();
  if (green.widths != w || green_normal.widths != w) {
    fail(ErrorKind::Structural, "KhModel: stack layout does not match the architecture");
  }
  if (green.begin != 0 || green_normal.begin != green.size ||
      params.size() != green.size + green_normal.size) {
    std::ostringstream os;
    os << "KhModel: expected " << green.size + green_normal.size << " parameters, found "
       << params.size();
    fail(ErrorKind::Structural, os.str());
  }
  for (double v : params) {
    if (!std::isfinite(v)) fail(ErrorKind::Structural, "KhModel: non-finite parameter");
  }
  if (!(eta >= 0.0) || !(sensor_radius > 0.0) || sensor_z.empty()) {
    fail(ErrorKind::Structural, "KhModel: sensor metadata missing");
  }
  const auto& n = normalization;
  if (!(n.r_max > n.r_min && n.z_max > n.z_min && n.t_max > n.t_min)) {
    fail(ErrorKind::Structural, "KhModel: degenerate normalization");
  }
}

double dense_forward(const StackLayout& layout, std::span<const double> params,
                     std::span<const double> features) {
  if (features.size() != layout.widths.front()) {
    fail(ErrorKind::Structural, "dense_forward: feature length does not match the input layer");
  }
  if (layout.begin + layout.size > params.size()) {
    fail(ErrorKind::Structural, "dense_forward: parameter vector too short for the layout");
  }
  std::vector<double> x(features.begin(), features.end()), y;
  for (std::size_t l = 0; l < layout.layers(); ++l) {
    y.resize(layout.widths[l + 1]);
    kernels::dense_forward(Exec::Serial, {x.data(), 1, x.size()}, kernel_view(layout, params, l),
                           bias_of(layout, params, l), {y.data(), 1, y.size()},
                           l + 1 < layout.layers());
    x.swap(y);
  }
  return x.front();
}

double kh_integrate(std::span<const double> phi, std::span<const double> weights) {
  if (phi.size() != weights.size()) {
    fail(ErrorKind::Structural, "kh_integrate: integrand and weights differ in length");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) acc += weights[j] * phi[j];
  return acc;
}

double mse_loss(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.empty()) fail(ErrorKind::Domain, "mse_loss: empty input");
  if (predictions.size() != truths.size()) {
    fail(ErrorKind::Domain, "mse_loss: predictions and truths differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - truths[i];
    acc += e * e;
  }
  return acc / static_cast<double>(predictions.size());
}

double lr_schedule(std::size_t epoch) {
  if (epoch < 300) return 1e-3;
  if (epoch < 600) return 1e-4;
  if (epoch < 900) return 1e-5;
  return 1e-6;
}

SensorInputs sensor_inputs(const SensorSet& sensors, const Normalization& norm) {
  SensorInputs in;
  in.z = sensors.z;
  in.weight = sensors.weight;
  in.radius = sensors.radius;
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    in.u.push_back(norm.temperature_to_unit(sensors.temperature[j]));
    in.dudn.push_back(norm.difference_to_unit(sensors.normal_derivative[j]));
  }
  return in;
}

void predict_batch(const KhModel& model, std::span<const Sample> batch, std::span<double> out,
                   Workspace& ws, Exec exec) {
  forward(model, batch, out, ws, exec, false);
}

double loss_and_gradients(const KhModel& model, std::span<const Sample> batch,
                          std::span<double> grad, Workspace& ws, Exec exec,
                          std::size_t batch_id) {
  if (batch.empty()) fail(ErrorKind::Domain, "gradients: empty batch");
  if (grad.size() != model.params.size()) {
    fail(ErrorKind::Structural, "gradients: gradient buffer does not match the model");
  }
  ws.prediction.resize(batch.size());
  forward(model, batch, ws.prediction, ws, exec, true);

  const double scale = 2.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  auto& dg_out = ws.green.delta.back().data;
  auto& ddg_out = ws.green_normal.delta.back().data;
  std::size_t row = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double e = ws.prediction[b] - batch[b].truth;
    loss += e * e;
    const double de = scale * e;
    for (std::size_t j = 0; j < batch[b].sensors->z.size(); ++j, ++row) {
      dg_out[row] = -de * ws.weight[row] * ws.dudn[row];
      ddg_out[row] = de * ws.weight[row] * ws.u[row];
    }
  }
  loss /= static_cast<double>(batch.size());

  stack_backward(exec, ws.green, model.green, grad);
  stack_backward(exec, ws.green_normal, model.green_normal, grad);

  for (double g : grad) {
    if (!std::isfinite(g)) {
      std::ostringstream os;
      os << "non-finite gradient in batch " << batch_id;
      throw NumericalError(os.str(), batch_id);
    }
  }
  return loss;
}

std::vector<double> predict(const KhModel& model, std::span<const Sample> samples, Exec exec) {
  std::vector<double> out(samples.size());
  const auto chunks = static_cast<std::ptrdiff_t>((samples.size() + kPredictChunk - 1) / kPredictChunk);
  auto run = [&](std::ptrdiff_t c, Workspace& ws) {
    const std::size_t lo = static_cast<std::size_t>(c) * kPredictChunk;
    const std::size_t n = std::min(kPredictChunk, samples.size() - lo);
    forward(model, samples.subspan(lo, n), std::span<double>(out).subspan(lo, n), ws,
            Exec::Serial, false);
  };
  if (exec == Exec::Serial) {
    Workspace ws;
    for (std::ptrdiff_t c = 0; c < chunks; ++c) run(c, ws);
    return out;
  }
#pragma omp parallel
  {
    Workspace ws;
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) run(c, ws);
  }
  return out;
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               double learning_rate) {
  if (state.m.size() != params.size() || state.v.size() != params.size() ||
      grad.size() != params.size()) {
    fail(ErrorKind::Structural, "adam_step: optimizer state does not match the parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

TemperatureField reconstruct_field(const KhModel& model, const SensorSet& sensors,
                                   const RodMesh& mesh, Exec exec) {
  if (sensors.size() != model.sensor_z.size()) {
    std::ostringstream os;
    os << "reconstruct: model was trained with " << model.sensor_z.size() << " sensors, got "
       << sensors.size();
    fail(ErrorKind::Config, os.str());
  }
  if (std::abs(sensors.eta - model.eta) > 1e-12 * std::max(1.0, model.eta)) {
    fail(ErrorKind::Config, "reconstruct: sensor eta differs from the model's");
  }
  if (std::abs(sensors.radius - model.sensor_radius) > 1e-12) {
    fail(ErrorKind::Config, "reconstruct: sensor radius differs from the model's");
  }
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    if (std::abs(sensors.z[j] - model.sensor_z[j]) > 1e-9) {
      fail(ErrorKind::Config, "reconstruct: sensor positions differ from the model's");
    }
  }
  const SensorInputs in = sensor_inputs(sensors, model.normalization);
  std::vector<Sample> samples(mesh.node_count());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = {mesh.node_r(i), mesh.node_z(i), 0.0, &in};
  }
  const auto u = predict(model, samples, exec);
  TemperatureField out{mesh, std::vector<double>(u.size())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.temperature[i] = model.normalization.temperature_from_unit(u[i]);
  }
  return out;
}

}  // namespace fuelrod::kh
