#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "fuelrod/error.hpp"
#include "fuelrod/khnet.hpp"

using namespace fuelrod;
using namespace fuelrod::kh;

namespace {

Normalization unit_norm() { return {0.0, 0.005, 0.0, 4.0, 560.0, 1300.0}; }

KhModel toy_model(std::uint64_t seed, std::vector<std::size_t> hidden = {6, 4}) {
  KhModel m = KhModel::create(std::move(hidden), unit_norm(), 1.0, 0.0047506, {0.8, 1.6, 2.4, 3.2});
  m.initialize(seed);
  return m;
}

SensorInputs toy_sensors(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SensorInputs s;
  s.z = {0.8, 1.6, 2.4, 3.2};
  s.weight = {1.2, 0.8, 0.8, 1.2};
  s.radius = 0.0047506;
  for (int j = 0; j < 4; ++j) {
    s.u.push_back(d(rng));
    s.dudn.push_back(0.3 * d(rng));
  }
  return s;
}

std::vector<Sample> toy_batch(const SensorInputs& s, std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> r(0.0, 0.0047), z(0.03, 3.7), t(-1.0, 1.0);
  std::vector<Sample> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back({r(rng), z(rng), t(rng), &s});
  return b;
}

// Independent forward pass: kernels stored [in][out] row-major, tanh on hidden layers.
double naive_stack(const std::vector<std::size_t>& w, const std::vector<double>& p, std::size_t at,
                   const Features& f) {
  std::vector<double> x(f.begin(), f.end());
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const std::size_t kernel = at;
    const std::size_t bias = at + w[l] * w[l + 1];
    std::vector<double> y(w[l + 1]);
    for (std::size_t o = 0; o < w[l + 1]; ++o) {
      double s = p[bias + o];
      for (std::size_t i = 0; i < w[l]; ++i) s += x[i] * p[kernel + i * w[l + 1] + o];
      y[o] = l + 2 < w.size() ? std::tanh(s) : s;
    }
    at = bias + w[l + 1];
    x = y;
  }
  return x[0];
}

double naive_prediction(const KhModel& m, const Sample& s) {
  const auto w = m.widths();
  double t = 0.0;
  for (std::size_t j = 0; j < s.sensors->z.size(); ++j) {
    const Features f = boundary_features(s.r, s.z, s.sensors->radius, s.sensors->z[j], m.normalization);
    const double g = naive_stack(w, m.params, 0, f);
    const double dg = naive_stack(w, m.params, m.green.size, f);
    t += s.sensors->weight[j] * (s.sensors->u[j] * dg - g * s.sensors->dudn[j]);
  }
  return t;
}

double batch_loss(const KhModel& m, std::span<const Sample> batch) {
  double l = 0.0;
  for (const auto& s : batch) {
    const double e = naive_prediction(m, s) - s.truth;
    l += e * e;
  }
  return l / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("feature geometry") {
  const auto n = unit_norm();
  const Features same = boundary_features(0.0047506, 1.5, 0.0047506, 1.5, n);
  CHECK(same[3] == 0.0);
  CHECK(same[4] == 0.0);
  const Features up = boundary_features(0.002, 2.0, 0.0047506, 2.5, n);
  const Features down = boundary_features(0.002, 2.0, 0.0047506, 1.5, n);
  CHECK(up[3] == doctest::Approx(-down[3]));
  CHECK(up[4] == doctest::Approx(down[4]));
  CHECK(up[0] == down[0]);
  CHECK(up[1] == down[1]);
  const Features corner = boundary_features(0.0, 0.0, 0.005, 4.0, n);
  CHECK(corner[0] == -1.0);
  CHECK(corner[2] == 1.0);
  CHECK(corner[4] == doctest::Approx(1.0));
}

TEST_CASE("stack layout offsets") {
  const auto s = StackLayout::make({5, 3, 2, 1}, 10);
  CHECK(s.kernel_offset == std::vector<std::size_t>{10, 28, 36});
  CHECK(s.bias_offset == std::vector<std::size_t>{25, 34, 38});
  CHECK(s.size == 29);
  const KhModel m = toy_model(0, {128, 64});
  CHECK(m.params.size() == 2 * (5 * 128 + 128 + 128 * 64 + 64 + 64 + 1));
}

TEST_CASE("dense forward matches an independent implementation") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const KhModel m = toy_model(seed, {9, 7});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      const Features f{d(rng), d(rng), d(rng), d(rng), d(rng)};
      CHECK(std::abs(dense_forward(m.green, m.params, f) - naive_stack(m.widths(), m.params, 0, f)) < 1e-12);
      CHECK(std::abs(dense_forward(m.green_normal, m.params, f) -
                     naive_stack(m.widths(), m.params, m.green.size, f)) < 1e-12);
    }
  }
}

TEST_CASE("dense forward edge cases") {
  KhModel m = toy_model(4);
  std::fill(m.params.begin(), m.params.end(), 0.0);
  const Features f{0.3, -0.2, 0.9, 0.1, 0.4};
  CHECK(dense_forward(m.green, m.params, f) == 0.0);
  // Saturated hidden units pass +-1 to the output layer.
  const auto w = m.widths();
  for (std::size_t i = 0; i < w[1]; ++i) m.params[m.green.bias_offset[0] + i] = 1000.0;
  for (std::size_t i = 0; i < w[2]; ++i) m.params[m.green.bias_offset[1] + i] = -1000.0;
  for (std::size_t i = 0; i < w[2]; ++i) m.params[m.green.kernel_offset[2] + i] = 0.5;
  CHECK(dense_forward(m.green, m.params, f) == doctest::Approx(-0.5 * static_cast<double>(w[2])));
  const std::vector<double> short_input{1.0, 2.0};
  CHECK_THROWS_AS(dense_forward(m.green, m.params, short_input), Error);
}

TEST_CASE("physical layer and integration") {
  CHECK(kh_physical_layer(1.0, 0.3, 0.2, 0.5) == doctest::Approx(0.44));
  CHECK(kh_physical_layer(0.7, -1.3, 0.0, 0.0) == 0.0);
  // Bilinear in (u, dudn) for fixed kernels.
  CHECK(kh_physical_layer(2.0, 0.6, 0.2, 0.5) == doctest::Approx(2.0 * 0.44));
  const std::vector<double> zeros(4, 0.0), w{0.5, 1.0, 1.0, 0.5};
  CHECK(kh_integrate(zeros, w) == 0.0);
  const std::vector<double> one{0.37}, unit{1.0};
  CHECK(kh_integrate(one, unit) == 0.37);
  CHECK_THROWS_AS(kh_integrate(one, w), Error);
}

TEST_CASE("boundary integral with the analytic Laplace kernel reproduces harmonic fields") {
  const std::size_t n = 256;
  const double ds = 2.0 * M_PI / static_cast<double>(n);
  struct Harmonic {
    double (*u)(double, double);
    double (*dudn)(double, double);  // on the unit circle
  };
  const Harmonic fields[] = {
      {[](double x, double y) { return x * x - y * y + x; },
       [](double x, double y) { return 2.0 * (x * x - y * y) + x; }},
      {[](double x, double y) { return x * x * x - 3.0 * x * y * y + 2.0 * y + 1.0; },
       [](double x, double y) { return 3.0 * (x * x * x - 3.0 * x * y * y) + 2.0 * y; }},
  };
  for (const auto& h : fields) {
    double worst = 0.0;
    for (double rad : {0.0, 0.3, 0.55, 0.8}) {
      for (int a = 0; a < 12; ++a) {
        const double px = rad * std::cos(0.5236 * a), py = rad * std::sin(0.5236 * a);
        std::vector<double> phi(n), w(n, ds);
        for (std::size_t j = 0; j < n; ++j) {
          const double th = ds * static_cast<double>(j);
          const double qx = std::cos(th), qy = std::sin(th);
          const double dx = qx - px, dy = qy - py;
          const double r2 = dx * dx + dy * dy;
          const double g = std::log(r2) / (4.0 * M_PI);
          const double dg = (dx * qx + dy * qy) / (2.0 * M_PI * r2);
          phi[j] = kh_physical_layer(h.u(qx, qy), h.dudn(qx, qy), g, dg);
        }
        worst = std::max(worst, std::abs(kh_integrate(phi, w) - h.u(px, py)));
      }
    }
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("mse loss") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{2.0, 3.0, 4.0};
  CHECK(mse_loss(a, a) == 0.0);
  CHECK(mse_loss(b, a) == 1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> p(10), t(10);
  for (int i = 0; i < 10; ++i) {
    p[i] = d(rng);
    t[i] = d(rng);
  }
  std::vector<double> diff(10);
  for (int i = 0; i < 10; ++i) diff[i] = p[i] - t[i];
  double mean_sq = 0.0;
  for (double v : diff) mean_sq += v * v;
  mean_sq /= 10.0;
  CHECK(std::abs(mse_loss(p, t) - mean_sq) < 1e-12);
  CHECK_THROWS_AS(mse_loss(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("learning-rate schedule") {
  CHECK(lr_schedule(0) == 1e-3);
  CHECK(lr_schedule(600) == 1e-5);
  CHECK(lr_schedule(1100) == 1e-6);
  for (std::size_t e = 0; e < 1200; ++e) {
    const double expected = e < 300 ? 1e-3 : e < 600 ? 1e-4 : e < 900 ? 1e-5 : 1e-6;
    CHECK(lr_schedule(e) == expected);
  }
}

TEST_CASE("batch prediction matches the independent forward") {
  std::mt19937_64 rng(5);
  const KhModel m = toy_model(5);
  const SensorInputs s = toy_sensors(rng);
  const auto batch = toy_batch(s, rng, 9);
  Workspace ws;
  std::vector<double> out(batch.size());
  predict_batch(m, batch, out, ws);
  for (std::size_t i = 0; i < batch.size(); ++i) CHECK(std::abs(out[i] - naive_prediction(m, batch[i])) < 1e-12);
  const auto par = predict(m, batch, Exec::Parallel);
  const auto ser = predict(m, batch, Exec::Serial);
  CHECK(par == ser);
}

TEST_CASE("prediction is linear in the sensor values") {
  std::mt19937_64 rng(6);
  const KhModel m = toy_model(6);
  const SensorInputs a = toy_sensors(rng), b = toy_sensors(rng);
  SensorInputs c = a;
  for (std::size_t j = 0; j < 4; ++j) {
    c.u[j] = 2.0 * a.u[j] - 0.5 * b.u[j];
    c.dudn[j] = 2.0 * a.dudn[j] - 0.5 * b.dudn[j];
  }
  for (int k = 0; k < 5; ++k) {
    const double r = 0.001 * k, z = 0.5 + 0.6 * k;
    const double pa = naive_prediction(m, {r, z, 0.0, &a});
    const double pb = naive_prediction(m, {r, z, 0.0, &b});
    Workspace ws;
    const Sample sc{r, z, 0.0, &c};
    double pc = 0.0;
    predict_batch(m, std::span<const Sample>(&sc, 1), std::span<double>(&pc, 1), ws);
    CHECK(pc == doctest::Approx(2.0 * pa - 0.5 * pb).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    KhModel m = toy_model(seed);
    const SensorInputs s = toy_sensors(rng);
    const auto batch = toy_batch(s, rng, 4);
    Workspace ws;
    std::vector<double> grad(m.params.size());
    const double loss = loss_and_gradients(m, batch, grad, ws);
    CHECK(std::abs(loss - batch_loss(m, batch)) < 1e-12);

    // Cover every layer of both stacks, then fill up to 20 indices at random.
    std::vector<std::size_t> picks;
    for (const StackLayout* st : {&m.green, &m.green_normal}) {
      for (std::size_t l = 0; l < st->layers(); ++l) {
        picks.push_back(st->kernel_offset[l]);
        picks.push_back(st->bias_offset[l]);
      }
    }
    std::uniform_int_distribution<std::size_t> any(0, m.params.size() - 1);
    while (picks.size() < 20) picks.push_back(any(rng));

    for (std::size_t k : picks) {
      const double h = 1e-6 * std::max(1.0, std::abs(m.params[k]));
      const double saved = m.params[k];
      m.params[k] = saved + h;
      const double up = batch_loss(m, batch);
      m.params[k] = saved - h;
      const double down = batch_loss(m, batch);
      m.params[k] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max(std::abs(fd), std::abs(grad[k]));
      CHECK(std::abs(fd - grad[k]) <= 1e-5 * scale + 1e-10);
    }
  }
}

TEST_CASE("serial and parallel gradients agree bitwise") {
  std::mt19937_64 rng(8);
  const KhModel m = toy_model(8, {16, 8});
  const SensorInputs s = toy_sensors(rng);
  const auto batch = toy_batch(s, rng, 32);
  Workspace a, b;
  std::vector<double> ga(m.params.size()), gb(m.params.size());
  const double la = loss_and_gradients(m, batch, ga, a, Exec::Serial);
  const double lb = loss_and_gradients(m, batch, gb, b, Exec::Parallel);
  CHECK(la == lb);
  CHECK(ga == gb);
}

TEST_CASE("a batch predicted exactly has zero gradient") {
  std::mt19937_64 rng(9);
  const KhModel m = toy_model(9);
  const SensorInputs s = toy_sensors(rng);
  auto batch = toy_batch(s, rng, 6);
  for (auto& b : batch) b.truth = naive_prediction(m, b);
  Workspace ws;
  std::vector<double> grad(m.params.size(), 1.0);
  const double loss = loss_and_gradients(m, batch, grad, ws);
  CHECK(loss < 1e-28);
  for (double g : grad) CHECK(std::abs(g) < 1e-12);
}

TEST_CASE("non-finite gradients carry the batch id") {
  std::mt19937_64 rng(10);
  const KhModel m = toy_model(10);
  SensorInputs s = toy_sensors(rng);
  s.u[0] = std::numeric_limits<double>::infinity();
  const auto batch = toy_batch(s, rng, 2);
  Workspace ws;
  std::vector<double> grad(m.params.size());
  try {
    loss_and_gradients(m, batch, grad, ws, Exec::Serial, 17);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
    CHECK(e.batch() == 17);
  }
}

TEST_CASE("Adam step") {
  std::vector<double> p{1.0, -2.0, 0.5};
  AdamState st;
  st.reset(3);
  const std::vector<double> zero(3, 0.0);
  adam_step(p, zero, st, 1e-3);
  CHECK(p == std::vector<double>{1.0, -2.0, 0.5});

  std::vector<double> q{1.0, -2.0, 0.5};
  AdamState first;
  first.reset(3);
  const std::vector<double> g{3.0, -0.01, 250.0};
  adam_step(q, g, first, 1e-3);
  CHECK(q[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(q[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
  CHECK(q[2] == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));

  // Quadratic bowl f = sum (x_i - c_i)^2.
  const std::vector<double> c{0.3, -0.7, 1.1};
  std::vector<double> x{0.0, 0.0, 0.0}, grad(3);
  AdamState bowl;
  bowl.reset(3);
  for (int it = 0; it < 5000; ++it) {
    for (int i = 0; i < 3; ++i) grad[i] = 2.0 * (x[i] - c[i]);
    adam_step(x, grad, bowl, 1e-2);
  }
  for (int i = 0; i < 3; ++i) CHECK(std::abs(x[i] - c[i]) < 1e-3);

  AdamState wrong;
  wrong.reset(2);
  CHECK_THROWS_AS(adam_step(x, grad, wrong, 1e-3), Error);
}

TEST_CASE("model structure validation") {
  KhModel m = toy_model(12);
  CHECK_NOTHROW(m.validate());
  m.params.pop_back();
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(KhModel::create({}, unit_norm(), 1.0, 0.0047, {1.0}), Error);
  CHECK_THROWS_AS(KhModel::create({4, 0}, unit_norm(), 1.0, 0.0047, {1.0}), Error);
  const KhModel a = toy_model(13), b = toy_model(13), c = toy_model(14);
  CHECK(a.params == b.params);
  CHECK(a.params != c.params);
  const double bound = 1.0 / std::sqrt(5.0);
  for (std::size_t k = 0; k < a.green.kernel_offset[1]; ++k) CHECK(std::abs(a.params[k]) <= bound);
}

TEST_CASE("reconstruction checks sensor metadata") {
  const KhModel m = toy_model(15);
  const RodMesh mesh = build_rod_mesh(RodGeometry{}, 3, 10, 2);
  SensorSet s;
  s.radius = 0.0047506;
  s.eta = 1.0;
  s.z = {0.8, 1.6, 2.4, 3.2};
  s.temperature = {600.0, 610.0, 612.0, 605.0};
  s.coolant_reference.assign(4, 583.15);
  for (double t : s.temperature) s.normal_derivative.push_back(-(t - 583.15));
  s.weight = {1.2, 0.8, 0.8, 1.2};
  const TemperatureField f = reconstruct_field(m, s, mesh);
  CHECK(f.temperature.size() == mesh.node_count());
  for (double t : f.temperature) CHECK(std::isfinite(t));

  SensorSet moved = s;
  moved.z[2] = 2.5;
  CHECK_THROWS_AS(reconstruct_field(m, moved, mesh), Error);
  SensorSet fewer = s;
  fewer.z.pop_back();
  CHECK_THROWS_AS(reconstruct_field(m, fewer, mesh), Error);
  SensorSet other_eta = s;
  other_eta.eta = 0.5;
  CHECK_THROWS_AS(reconstruct_field(m, other_eta, mesh), Error);
}
