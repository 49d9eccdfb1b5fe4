// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include "mdgan/simd/kernels.hpp"

namespace mdgan::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// One row of a against four rows of b.
inline void dot4(const double* a, const double* b0, const double* b1, const double* b2,
                 const double* b3, std::size_t k, double* out) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= k; p += 4) {
    const __m256d va = _mm256_loadu_pd(a + p);
    s0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + p), s0);
    s1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + p), s1);
    s2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + p), s2);
    s3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + p), s3);
  }
  // Transpose-reduce the four accumulators into one vector of sums.
  const __m256d t01 = _mm256_hadd_pd(s0, s1);
  const __m256d t23 = _mm256_hadd_pd(s2, s3);
  const __m256d swapped = _mm256_permute2f128_pd(t01, t23, 0x21);
  const __m256d blended = _mm256_blend_pd(t01, t23, 0b1100);
  __m256d sums = _mm256_add_pd(swapped, blended);
  double r[4];
  _mm256_storeu_pd(r, sums);
  for (; p < k; ++p) {
    r[0] += a[p] * b0[p];
    r[1] += a[p] * b1[p];
    r[2] += a[p] * b2[p];
    r[3] += a[p] * b3[p];
  }
  out[0] = r[0];
  out[1] = r[1];
  out[2] = r[2];
  out[3] = r[3];
}

void matmul_nt_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                    std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = a + i * k;
    double* out = c + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4)
      dot4(row, b + j * k, b + (j + 1) * k, b + (j + 2) * k, b + (j + 3) * k, k, out + j);
    for (; j < n; ++j) out[j] = dot_avx2(row, b + j * k, k);
  }
}

void matmul_nn_acc_avx2(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = a[i * n + j];
      if (s != 0.0) axpy_avx2(s, b + j * k, c + i * k, k);
    }
}

void matmul_tn_acc_avx2(const double* a, const double* b, double* c, std::size_t m,
                        std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double s = a[i * n + j];
      if (s != 0.0) axpy_avx2(s, b + i * k, c + j * k, k);
    }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",         dot_avx2,           squared_distance_avx2,
                                 axpy_avx2,      matmul_nt_avx2,     matmul_nn_acc_avx2,
                                 matmul_tn_acc_avx2};
  return table;
}

}  // namespace mdgan::simd
