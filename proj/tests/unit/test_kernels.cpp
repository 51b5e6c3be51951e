#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "doctest.h"

#include "fuelrod/kernels.hpp"

using namespace fuelrod::kernels;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix m;
  m.resize(r, c);
  for (auto& v : m.data) v = d(rng);
  return m;
}

struct ThreadScope {
  int saved = omp_get_max_threads();
  explicit ThreadScope(int n) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("dense forward matches a naive product") {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(7, 5, rng);
  const Matrix k = random_matrix(5, 3, rng);
  const Matrix b = random_matrix(1, 3, rng);
  Matrix y;
  y.resize(7, 3);
  dense_forward(Exec::Serial, x.cview(), k.cview(), b.data, y.view(), true);
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t o = 0; o < 3; ++o) {
      double s = b.data[o];
      for (std::size_t j = 0; j < 5; ++j) s += x.data[i * 5 + j] * k.data[j * 3 + o];
      CHECK(y.data[i * 3 + o] == doctest::Approx(std::tanh(s)).epsilon(1e-14));
    }
  }
}

TEST_CASE("backward kernels match naive sums") {
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(6, 4, rng);
  const Matrix dy = random_matrix(6, 3, rng);
  const Matrix k = random_matrix(4, 3, rng);
  Matrix kt, dk, db, dx;
  kt.resize(3, 4);
  dk.resize(4, 3);
  db.resize(1, 3);
  dx.resize(6, 4);
  transpose(k.cview(), kt.view());
  dense_backward_params(Exec::Serial, x.cview(), dy.cview(), dk.view(), db.data);
  dense_backward_input(Exec::Serial, dy.cview(), kt.cview(), dx.view());
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t o = 0; o < 3; ++o) {
      double s = 0.0;
      for (std::size_t i = 0; i < 6; ++i) s += x.data[i * 4 + j] * dy.data[i * 3 + o];
      CHECK(dk.data[j * 3 + o] == doctest::Approx(s).epsilon(1e-14));
    }
  }
  for (std::size_t o = 0; o < 3; ++o) {
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) s += dy.data[i * 3 + o];
    CHECK(db.data[o] == doctest::Approx(s).epsilon(1e-14));
  }
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t o = 0; o < 3; ++o) s += dy.data[i * 3 + o] * k.data[j * 3 + o];
      CHECK(dx.data[i * 4 + j] == doctest::Approx(s).epsilon(1e-14));
    }
  }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  const ThreadScope threads(4);
  std::mt19937_64 rng(3);
  const std::size_t rows = 301, in = 37, out = 29;
  const Matrix x = random_matrix(rows, in, rng);
  const Matrix k = random_matrix(in, out, rng);
  const Matrix b = random_matrix(1, out, rng);
  const Matrix dy = random_matrix(rows, out, rng);
  Matrix kt;
  kt.resize(out, in);
  transpose(k.cview(), kt.view());

  for (bool act : {false, true}) {
    Matrix ys, yp;
    ys.resize(rows, out);
    yp.resize(rows, out);
    dense_forward(Exec::Serial, x.cview(), k.cview(), b.data, ys.view(), act);
    dense_forward(Exec::Parallel, x.cview(), k.cview(), b.data, yp.view(), act);
    CHECK(ys.data == yp.data);
  }

  Matrix dks, dkp, dbs, dbp;
  dks.resize(in, out);
  dkp.resize(in, out);
  dbs.resize(1, out);
  dbp.resize(1, out);
  dense_backward_params(Exec::Serial, x.cview(), dy.cview(), dks.view(), dbs.data);
  dense_backward_params(Exec::Parallel, x.cview(), dy.cview(), dkp.view(), dbp.data);
  CHECK(dks.data == dkp.data);
  CHECK(dbs.data == dbp.data);

  Matrix dxs, dxp;
  dxs.resize(rows, in);
  dxp.resize(rows, in);
  dense_backward_input(Exec::Serial, dy.cview(), kt.cview(), dxs.view());
  dense_backward_input(Exec::Parallel, dy.cview(), kt.cview(), dxp.view());
  CHECK(dxs.data == dxp.data);

  Matrix gs = dy, gp = dy;
  tanh_backward(Exec::Serial, x.cview(), gs.view());
  tanh_backward(Exec::Parallel, x.cview(), gp.view());
  CHECK(gs.data == gp.data);
}
