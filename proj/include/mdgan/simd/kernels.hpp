#pragma once

// Dense double-precision kernels used by the network and the mixture head.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once per process at first use:
// AVX2 when the CPU reports avx2+fma, scalar otherwise. Setting the
// environment variable MDGAN_SIMD=scalar forces the reference path.
//
// All matrices are row-major and densely packed.

#include <cstddef>
#include <string_view>

namespace mdgan::simd {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // c[m x n] = a[m x k] * b[n x k]^T
  void (*matmul_nt)(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                    std::size_t k);

  // c[m x k] += a[m x n] * b[n x k]
  void (*matmul_nn_acc)(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t n, std::size_t k);

  // c[n x k] += a[m x n]^T * b[m x k]
  void (*matmul_tn_acc)(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t n, std::size_t k);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// The table selected for this process.
const KernelTable& kernels();

}  // namespace mdgan::simd
