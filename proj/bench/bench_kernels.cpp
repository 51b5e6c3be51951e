#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fuelrod/kernels.hpp"
#include "fuelrod/khnet.hpp"

using namespace fuelrod;
using kernels::Exec;

namespace {

kernels::Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  kernels::Matrix m;
  m.resize(r, c);
  for (auto& v : m.data) v = d(rng);
  return m;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

// Batch 32 x 4 sensors through the 128-wide first hidden layer.
void BM_DenseForward(benchmark::State& state) {
  const auto x = random_matrix(128, 128, 1);
  const auto k = random_matrix(128, 64, 2);
  const auto b = random_matrix(1, 64, 3);
  kernels::Matrix y;
  y.resize(128, 64);
  for (auto _ : state) {
    kernels::dense_forward(exec_of(state), x.cview(), k.cview(), b.data, y.view(), true);
    benchmark::DoNotOptimize(y.data.data());
  }
}

void BM_DenseBackwardParams(benchmark::State& state) {
  const auto x = random_matrix(128, 128, 4);
  const auto dy = random_matrix(128, 64, 5);
  kernels::Matrix dk, db;
  dk.resize(128, 64);
  db.resize(1, 64);
  for (auto _ : state) {
    kernels::dense_backward_params(exec_of(state), x.cview(), dy.cview(), dk.view(), db.data);
    benchmark::DoNotOptimize(dk.data.data());
  }
}

void BM_DenseBackwardInput(benchmark::State& state) {
  const auto dy = random_matrix(128, 64, 6);
  const auto kt = random_matrix(64, 128, 7);
  kernels::Matrix dx;
  dx.resize(128, 128);
  for (auto _ : state) {
    kernels::dense_backward_input(exec_of(state), dy.cview(), kt.cview(), dx.view());
    benchmark::DoNotOptimize(dx.data.data());
  }
}

void BM_BatchGradient(benchmark::State& state) {
  kh::KhModel m = kh::KhModel::create({128, 64}, Normalization{0.0, 0.0047506, 0.0, 3.876, 583.0, 1300.0},
                                      1.0, 0.0047506, {0.7752, 1.5504, 2.3256, 3.1008});
  m.initialize(1);
  kh::SensorInputs s;
  s.z = m.sensor_z;
  s.radius = m.sensor_radius;
  s.u = {-0.8, -0.6, -0.6, -0.8};
  s.dudn = {-0.1, -0.2, -0.2, -0.1};
  s.weight = {1.2, 0.8, 0.8, 0.8};
  std::vector<kh::Sample> batch;
  for (int i = 0; i < 32; ++i) batch.push_back({0.00015 * i, 0.1 * i + 0.05, 0.1, &s});
  kh::Workspace ws;
  std::vector<double> grad(m.params.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kh::loss_and_gradients(m, batch, grad, ws, exec_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_DenseForward)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_DenseBackwardParams)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_DenseBackwardInput)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1)->ArgName("parallel");

BENCHMARK_MAIN();
