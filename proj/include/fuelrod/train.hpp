#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fuelrod/khnet.hpp"
#include "fuelrod/pipeline.hpp"

namespace fuelrod::kh {

/// Piecewise-constant learning rate: rates[i] applies from breakpoints[i-1]
/// (or epoch 0) up to breakpoints[i]; the last rate holds thereafter.
struct LrSchedule {
  std::vector<std::size_t> breakpoints{300, 600, 900};
  std::vector<double> rates{1e-3, 1e-4, 1e-5, 1e-6};

  static LrSchedule constant(double rate) { return {{}, {rate}}; }
  double at(std::size_t epoch) const;
  void validate() const;
};

struct TrainConfig {
  std::size_t epochs = 1100;
  std::size_t batch_size = 32;
  LrSchedule schedule;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden{128, 64};
  std::size_t divergence_window = 50;
  double divergence_factor = 10.0;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_mse;
  std::vector<double> val_mse;
  std::vector<double> learning_rate;
  double initial_train_mse = 0.0;
  std::size_t best_epoch = 0;
  double wall_time = 0.0;  // [s]
};

struct TrainResult {
  KhModel model;  // best-validation checkpoint
  TrainHistory history;
};

using ProgressFn = std::function<void(std::size_t epoch, double train_mse, double val_mse)>;

/// Every (case, mesh node) pair of the given cases, with normalized truths.
/// `inputs` receives one SensorInputs per case and must outlive the samples.
std::vector<Sample> make_samples(std::span<const CaseRecord* const> cases,
                                 const Normalization& norm, std::vector<SensorInputs>& inputs);

/// Mini-batch Adam on the training split, validated every epoch.
/// Throws Config when the train or validate split is empty and Training on
/// divergence.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const ProgressFn& progress = {}, Exec exec = Exec::Parallel);

}  // namespace fuelrod::kh
