#pragma once

// Dense-layer kernels on row-major matrices.
//
// Every kernel has a serial reference and an OpenMP version. Both visit the
// same per-element summation order, so they produce bit-identical results
// regardless of the thread count; only the distribution of rows (or kernel
// rows) across threads differs.

#include <cstddef>
#include <span>
#include <vector>

namespace fuelrod::kernels {

enum class Exec { Serial, Parallel };

/// Row-major matrix view.
template <typename T>
struct MatrixView {
  T* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  T* row(std::size_t i) const { return data + i * cols; }
};

using ConstView = MatrixView<const double>;
using View = MatrixView<double>;

struct Matrix {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  void resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    data.resize(r * c);
  }
  View view() { return {data.data(), rows, cols}; }
  ConstView view() const { return {data.data(), rows, cols}; }
  ConstView cview() const { return {data.data(), rows, cols}; }
};

/// y = x K + b, optionally followed by tanh. K is in x out.
void dense_forward(Exec exec, ConstView x, ConstView kernel, std::span<const double> bias,
                   View y, bool apply_tanh);

/// dK = x^T dy and db = column sums of dy (overwritten).
void dense_backward_params(Exec exec, ConstView x, ConstView dy, View dkernel,
                           std::span<double> dbias);

/// dx = dy K^T, using the transposed kernel (out x in).
void dense_backward_input(Exec exec, ConstView dy, ConstView kernel_t, View dx);

/// dz = da * (1 - a^2) in place on `da`, for tanh activations `a`.
void tanh_backward(Exec exec, ConstView activation, View grad);

void transpose(ConstView a, View out);

}  // namespace fuelrod::kernels
