#pragma once

// Dense kernels shared by the plain and the taped forward passes so both
// produce bitwise-identical values.

#include <algorithm>
#include <cmath>

namespace paycheck::kernels {

// y = W x + b, W row-major (rows x cols).
inline void affine(const double* weights, const double* bias, const double* x, int rows, int cols,
                   double* y) {
  for (int i = 0; i < rows; ++i) {
    const double* row = weights + static_cast<long>(i) * cols;
    // Four independent partial sums keep the FMA pipeline busy; the order is
    // fixed, so results are deterministic.
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    int j = 0;
    for (; j + 4 <= cols; j += 4) {
      a0 += row[j] * x[j];
      a1 += row[j + 1] * x[j + 1];
      a2 += row[j + 2] * x[j + 2];
      a3 += row[j + 3] * x[j + 3];
    }
    for (; j < cols; ++j) a0 += row[j] * x[j];
    y[i] = ((a0 + a1) + (a2 + a3)) + bias[i];
  }
}

inline void softmax(const double* x, int n, double* y) {
  double top = x[0];
  for (int i = 1; i < n; ++i) top = std::max(top, x[i]);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    y[i] = std::exp(x[i] - top);
    total += y[i];
  }
  for (int i = 0; i < n; ++i) y[i] /= total;
}

}  // namespace paycheck::kernels
