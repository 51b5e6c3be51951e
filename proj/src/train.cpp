#include "fuelrod/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fuelrod/error.hpp"

namespace fuelrod::kh {

double LrSchedule::at(std::size_t epoch) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), epoch);
  return rates[static_cast<std::size_t>(it - breakpoints.begin())];
}

void LrSchedule::validate() const {
  if (rates.size() != breakpoints.size() + 1) {
    fail(ErrorKind::Config, "lr schedule: need exactly one more rate than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] <= breakpoints[i - 1]) {
      fail(ErrorKind::Config, "lr schedule: breakpoints must be strictly increasing");
    }
  }
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Config, "lr schedule: rates must be > 0");
  }
}

void TrainConfig::validate() const {
  if (epochs == 0) fail(ErrorKind::Config, "train: epochs must be >= 1");
  if (batch_size == 0) fail(ErrorKind::Config, "train: batch size must be >= 1");
  schedule.validate();
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    fail(ErrorKind::Config, "train: Adam constants out of range");
  }
  if (hidden.empty()) fail(ErrorKind::Config, "train: at least one hidden layer required");
  if (divergence_window == 0 || !(divergence_factor > 1.0)) {
    fail(ErrorKind::Config, "train: divergence guard misconfigured");
  }
}

std::vector<Sample> make_samples(std::span<const CaseRecord* const> cases,
                                 const Normalization& norm, std::vector<SensorInputs>& inputs) {
  inputs.clear();
  inputs.reserve(cases.size());
  for (const auto* c : cases) inputs.push_back(sensor_inputs(c->sensors, norm));
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& field = cases[k]->solution.field;
    for (std::size_t i = 0; i < field.mesh.node_count(); ++i) {
      samples.push_back({field.mesh.node_r(i), field.mesh.node_z(i),
                         norm.temperature_to_unit(field.temperature[i]), &inputs[k]});
    }
  }
  return samples;
}

namespace {

double full_mse(const KhModel& model, std::span<const Sample> samples, Exec exec) {
  const auto pred = predict(model, samples, exec);
  std::vector<double> truth(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) truth[i] = samples[i].truth;
  return mse_loss(pred, truth);
}

}  // namespace

TrainResult train(const Dataset& dataset, const TrainConfig& config, const ProgressFn& progress,
                  Exec exec) {
  config.validate();
  const auto train_cases = dataset.split(Split::Train);
  const auto val_cases = dataset.split(Split::Validate);
  if (train_cases.empty()) fail(ErrorKind::Config, "train: dataset has no training cases");
  if (val_cases.empty()) fail(ErrorKind::Config, "train: dataset has no validation cases");

  const auto start = std::chrono::steady_clock::now();
  const auto& first = train_cases.front()->sensors;
  KhModel model = KhModel::create(config.hidden, dataset.normalization, first.eta, first.radius,
                                  first.z);
  model.initialize(config.seed);

  std::vector<SensorInputs> train_inputs, val_inputs;
  auto train_samples = make_samples(train_cases, dataset.normalization, train_inputs);
  const auto val_samples = make_samples(val_cases, dataset.normalization, val_inputs);

  std::mt19937_64 rng(config.seed);
  AdamState adam;
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.epsilon = config.epsilon;
  adam.reset(model.params.size());

  TrainResult result{model, {}};
  TrainHistory& h = result.history;
  h.initial_train_mse = full_mse(model, train_samples, exec);
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t above = 0;

  Workspace ws;
  std::vector<double> grad(model.params.size());
  std::size_t batch_id = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.schedule.at(epoch);
    std::shuffle(train_samples.begin(), train_samples.end(), rng);
    double sum = 0.0;
    for (std::size_t lo = 0; lo < train_samples.size(); lo += config.batch_size, ++batch_id) {
      const std::size_t n = std::min(config.batch_size, train_samples.size() - lo);
      const double loss = loss_and_gradients(
          model, std::span<const Sample>(train_samples).subspan(lo, n), grad, ws, exec, batch_id);
      sum += loss * static_cast<double>(n);
      adam_step(model.params, grad, adam, lr);
    }
    const double train_mse = sum / static_cast<double>(train_samples.size());
    const double val_mse = full_mse(model, val_samples, exec);
    h.train_mse.push_back(train_mse);
    h.val_mse.push_back(val_mse);
    h.learning_rate.push_back(lr);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse)) {
      std::ostringstream os;
      os << "train: loss became non-finite at epoch " << epoch;
      fail(ErrorKind::Training, os.str());
    }
    if (val_mse < best_val) {
      best_val = val_mse;
      h.best_epoch = epoch;
      result.model.params = model.params;
    }
    above = train_mse > config.divergence_factor * h.initial_train_mse ? above + 1 : 0;
    if (above >= config.divergence_window) {
      std::ostringstream os;
      os << "train: diverged, train MSE above " << config.divergence_factor
         << "x its initial value for " << above << " consecutive epochs (epoch " << epoch << ")";
      fail(ErrorKind::Training, os.str());
    }
    if (progress) progress(epoch, train_mse, val_mse);
  }
  h.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace fuelrod::kh
