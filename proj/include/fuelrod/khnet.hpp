#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fuelrod/conduction.hpp"
#include "fuelrod/kernels.hpp"
#include "fuelrod/pipeline.hpp"

namespace fuelrod::kh {

using kernels::Exec;

inline constexpr std::size_t kFeatureCount = 5;

/// Radial coordinates are stretched by this factor before measuring the
/// point-to-sensor distance, so both directions carry comparable weight.
inline constexpr double kRadialStretch = 100.0;

using Features = std::array<double, kFeatureCount>;

/// Normalized [r, z, z_j, dz, rho] for an interior point and a sensor.
Features boundary_features(double r, double z, double sensor_r, double sensor_z,
                           const Normalization& norm);

/// Offsets of one dense stack inside the flat parameter vector.
/// Layer l has a kernel of widths[l] x widths[l+1] (row-major) then a bias.
struct StackLayout {
  std::vector<std::size_t> widths;
  std::vector<std::size_t> kernel_offset;
  std::vector<std::size_t> bias_offset;
  std::size_t begin = 0;
  std::size_t size = 0;

  static StackLayout make(std::vector<std::size_t> widths, std::size_t begin);
  std::size_t layers() const { return widths.size() - 1; }
};

/// Two dense stacks: G(r, r') and its normal derivative, plus everything
/// needed to map Kelvin and metres into the network's units.
struct KhModel {
  std::vector<std::size_t> hidden{128, 64};
  StackLayout green;
  StackLayout green_normal;
  std::vector<double> params;
  Normalization normalization;
  double eta = 1.0;
  double sensor_radius = 0.0;
  std::vector<double> sensor_z;

  static KhModel create(std::vector<std::size_t> hidden, const Normalization& norm, double eta,
                        double sensor_radius, std::vector<double> sensor_z);

  std::vector<std::size_t> widths() const;
  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for kernels and biases.
  void initialize(std::uint64_t seed);
  /// Structural checks: layer shapes, parameter count, finiteness.
  void validate() const;
};

/// y = K3^T tanh(K2^T tanh(K1^T x + b1) + b2) + b3 for a single input.
double dense_forward(const StackLayout& layout, std::span<const double> params,
                     std::span<const double> features);

/// Integrand of the boundary integral: u dG - G du/dn.
inline double kh_physical_layer(double u, double dudn, double g, double dg) {
  return u * dg - g * dudn;
}

/// sum_j w_j phi_j.
double kh_integrate(std::span<const double> phi, std::span<const double> weights);

double mse_loss(std::span<const double> predictions, std::span<const double> truths);

/// Staged decay: 1e-3, 1e-4, 1e-5 and 1e-6 from epochs 0, 300, 600 and 900.
double lr_schedule(std::size_t epoch);

/// Sensor data in network units for one case.
struct SensorInputs {
  std::vector<double> z;
  std::vector<double> u;      // normalized temperatures
  std::vector<double> dudn;   // normalized surrogate derivatives
  std::vector<double> weight;
  double radius = 0.0;
};

SensorInputs sensor_inputs(const SensorSet& sensors, const Normalization& norm);

/// One (point, truth) sample against a sensor set.
struct Sample {
  double r;
  double z;
  double truth;  // normalized temperature
  const SensorInputs* sensors;
};

/// Scratch buffers reused across batches.
struct Workspace {
  struct StackCache {
    std::vector<kernels::Matrix> act;    // act[0] = inputs, act[l+1] = layer outputs
    std::vector<kernels::Matrix> delta;  // gradient wrt layer pre-activations
    std::vector<kernels::Matrix> kernel_t;
  };
  StackCache green, green_normal;
  kernels::Matrix features;
  std::vector<double> u, dudn, weight, prediction;
};

/// Normalized predictions for a batch of samples.
void predict_batch(const KhModel& model, std::span<const Sample> batch, std::span<double> out,
                   Workspace& ws, Exec exec = Exec::Serial);

/// Mean squared error of the batch and its exact gradient wrt every parameter
/// (written into `grad`, same layout as model.params). A non-finite gradient
/// raises NumericalError tagged with `batch_id`.
double loss_and_gradients(const KhModel& model, std::span<const Sample> batch,
                          std::span<double> grad, Workspace& ws, Exec exec = Exec::Serial,
                          std::size_t batch_id = 0);

/// Normalized predictions for many samples, chunked (and threaded when
/// `exec` is Parallel). Results do not depend on `exec`.
std::vector<double> predict(const KhModel& model, std::span<const Sample> samples,
                            Exec exec = Exec::Parallel);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  void reset(std::size_t n) {
    step = 0;
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
};

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               double learning_rate);

/// Evaluates the network at every node of `mesh` and returns Kelvin.
/// Throws Config when the sensors do not match what the model was trained on.
TemperatureField reconstruct_field(const KhModel& model, const SensorSet& sensors,
                                   const RodMesh& mesh, Exec exec = Exec::Parallel);

}  // namespace fuelrod::kh
