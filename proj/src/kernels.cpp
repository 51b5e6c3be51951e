#include "fuelrod/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fuelrod::kernels {

namespace {

inline void forward_row(const double* __restrict x, std::size_t in,
                        const double* __restrict kernel, const double* __restrict bias,
                        std::size_t out, double* __restrict y, bool apply_tanh) {
  std::copy(bias, bias + out, y);
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = x[i];
    const double* kr = kernel + i * out;
    for (std::size_t o = 0; o < out; ++o) y[o] += xi * kr[o];
  }
  if (apply_tanh) {
    for (std::size_t o = 0; o < out; ++o) y[o] = std::tanh(y[o]);
  }
}

// Row k of dK: sum over samples in ascending order.
inline void kernel_grad_row(ConstView x, ConstView dy, std::size_t k, double* __restrict dk) {
  const std::size_t out = dy.cols;
  std::fill(dk, dk + out, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double xk = x.row(i)[k];
    const double* __restrict g = dy.row(i);
    for (std::size_t o = 0; o < out; ++o) dk[o] += xk * g[o];
  }
}

inline void bias_grad(ConstView dy, std::size_t o, double* db) {
  double s = 0.0;
  for (std::size_t i = 0; i < dy.rows; ++i) s += dy.row(i)[o];
  db[o] = s;
}

inline void input_grad_row(const double* __restrict g, std::size_t out, ConstView kernel_t,
                           double* __restrict dx) {
  const std::size_t in = kernel_t.cols;
  std::fill(dx, dx + in, 0.0);
  for (std::size_t o = 0; o < out; ++o) {
    const double go = g[o];
    const double* __restrict kr = kernel_t.row(o);
    for (std::size_t k = 0; k < in; ++k) dx[k] += go * kr[k];
  }
}

}  // namespace

void dense_forward(Exec exec, ConstView x, ConstView kernel, std::span<const double> bias, View y,
                   bool apply_tanh) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      forward_row(x.row(static_cast<std::size_t>(i)), x.cols, kernel.data, bias.data(), kernel.cols,
                  y.row(static_cast<std::size_t>(i)), apply_tanh);
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    forward_row(x.row(static_cast<std::size_t>(i)), x.cols, kernel.data, bias.data(), kernel.cols,
                y.row(static_cast<std::size_t>(i)), apply_tanh);
  }
}

void dense_backward_params(Exec exec, ConstView x, ConstView dy, View dkernel,
                           std::span<double> dbias) {
  const auto in = static_cast<std::ptrdiff_t>(x.cols);
  const auto out = static_cast<std::ptrdiff_t>(dy.cols);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t k = 0; k < in; ++k) {
      kernel_grad_row(x, dy, static_cast<std::size_t>(k), dkernel.row(static_cast<std::size_t>(k)));
    }
    for (std::ptrdiff_t o = 0; o < out; ++o) bias_grad(dy, static_cast<std::size_t>(o), dbias.data());
    return;
  }
#pragma omp parallel
  {
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = 0; k < in; ++k) {
      kernel_grad_row(x, dy, static_cast<std::size_t>(k), dkernel.row(static_cast<std::size_t>(k)));
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t o = 0; o < out; ++o) bias_grad(dy, static_cast<std::size_t>(o), dbias.data());
  }
}

void dense_backward_input(Exec exec, ConstView dy, ConstView kernel_t, View dx) {
  const auto n = static_cast<std::ptrdiff_t>(dy.rows);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      input_grad_row(dy.row(static_cast<std::size_t>(i)), dy.cols, kernel_t,
                     dx.row(static_cast<std::size_t>(i)));
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    input_grad_row(dy.row(static_cast<std::size_t>(i)), dy.cols, kernel_t,
                   dx.row(static_cast<std::size_t>(i)));
  }
}

void tanh_backward(Exec exec, ConstView activation, View grad) {
  const auto n = static_cast<std::ptrdiff_t>(grad.rows * grad.cols);
  const double* a = activation.data;
  double* g = grad.data;
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) g[i] *= 1.0 - a[i] * a[i];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) g[i] *= 1.0 - a[i] * a[i];
}

void transpose(ConstView a, View out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) out.row(j)[i] = a.row(i)[j];
  }
}

}  // namespace fuelrod::kernels
