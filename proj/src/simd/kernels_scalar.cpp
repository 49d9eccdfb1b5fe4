#include "mdgan/simd/kernels.hpp"

namespace mdgan::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matmul_nt_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                      std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = dot_scalar(a + i * k, b + j * k, k);
}

void matmul_nn_acc_scalar(const double* a, const double* b, double* c, std::size_t m,
                          std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = a[i * n + j];
      if (s != 0.0) axpy_scalar(s, b + j * k, c + i * k, k);
    }
}

void matmul_tn_acc_scalar(const double* a, const double* b, double* c, std::size_t m,
                          std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = a[i * n + j];
      if (s != 0.0) axpy_scalar(s, b + i * k, c + j * k, k);
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",         dot_scalar,           squared_distance_scalar,
                                 axpy_scalar,      matmul_nt_scalar,     matmul_nn_acc_scalar,
                                 matmul_tn_acc_scalar};
  return table;
}

}  // namespace mdgan::simd
