// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// CPUID check, so nothing in here may be called on a CPU without AVX2.

#include <immintrin.h>

#include "cae/kernels.hpp"

namespace cae::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  const __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// C[R x n] += A[R x p] * B[p x n] where A(r, q) = a[r * a_rs + q * a_cs].
// Shared by gemm_nn (a_rs = lda, a_cs = 1) and gemm_tn (a_rs = 1, a_cs = lda).
template <int R>
void row_block(std::size_t n, std::size_t p, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
               std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d acc0[R];
    __m256d acc1[R];
    for (int r = 0; r < R; ++r) {
      acc0[r] = _mm256_setzero_pd();
      acc1[r] = _mm256_setzero_pd();
    }
    for (std::size_t q = 0; q < p; ++q) {
      const double* bq = b + q * ldb + j;
      const __m256d b0 = _mm256_loadu_pd(bq);
      const __m256d b1 = _mm256_loadu_pd(bq + 4);
      for (int r = 0; r < R; ++r) {
        const __m256d av = _mm256_set1_pd(a[r * a_rs + q * a_cs]);
        acc0[r] = _mm256_fmadd_pd(av, b0, acc0[r]);
        acc1[r] = _mm256_fmadd_pd(av, b1, acc1[r]);
      }
    }
    for (int r = 0; r < R; ++r) {
      double* cr = c + r * ldc + j;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), acc0[r]));
      _mm256_storeu_pd(cr + 4, _mm256_add_pd(_mm256_loadu_pd(cr + 4), acc1[r]));
    }
  }
  for (; j + 4 <= n; j += 4) {
    __m256d acc[R];
    for (int r = 0; r < R; ++r) acc[r] = _mm256_setzero_pd();
    for (std::size_t q = 0; q < p; ++q) {
      const __m256d b0 = _mm256_loadu_pd(b + q * ldb + j);
      for (int r = 0; r < R; ++r) acc[r] = _mm256_fmadd_pd(_mm256_set1_pd(a[r * a_rs + q * a_cs]), b0, acc[r]);
    }
    for (int r = 0; r < R; ++r) {
      double* cr = c + r * ldc + j;
      _mm256_storeu_pd(cr, _mm256_add_pd(_mm256_loadu_pd(cr), acc[r]));
    }
  }
  for (; j < n; ++j) {
    for (int r = 0; r < R; ++r) {
      double s = 0.0;
      for (std::size_t q = 0; q < p; ++q) s += a[r * a_rs + q * a_cs] * b[q * ldb + j];
      c[r * ldc + j] += s;
    }
  }
}

void strided_gemm(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t a_rs, std::size_t a_cs,
                  const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) row_block<4>(n, p, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  switch (m - i) {
    case 3:
      row_block<3>(n, p, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
      break;
    case 2:
      row_block<2>(n, p, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
      break;
    case 1:
      row_block<1>(n, p, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
      break;
    default:
      break;
  }
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
    s1 = _mm256_fmadd_pd(d1, d1, s1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  strided_gemm(m, n, p, a, lda, 1, b, ldb, c, ldc);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  strided_gemm(m, n, p, a, 1, lda, b, ldb, c, ldc);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * lda;
    const double* a1 = a0 + lda;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + j * ldb;
      const double* b1 = b0 + ldb;
      const double* b2 = b1 + ldb;
      const double* b3 = b2 + ldb;
      __m256d s00 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd(), s02 = _mm256_setzero_pd(),
              s03 = _mm256_setzero_pd();
      __m256d s10 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd(), s12 = _mm256_setzero_pd(),
              s13 = _mm256_setzero_pd();
      std::size_t q = 0;
      for (; q + 4 <= p; q += 4) {
        const __m256d x0 = _mm256_loadu_pd(a0 + q);
        const __m256d x1 = _mm256_loadu_pd(a1 + q);
        const __m256d y0 = _mm256_loadu_pd(b0 + q);
        const __m256d y1 = _mm256_loadu_pd(b1 + q);
        const __m256d y2 = _mm256_loadu_pd(b2 + q);
        const __m256d y3 = _mm256_loadu_pd(b3 + q);
        s00 = _mm256_fmadd_pd(x0, y0, s00);
        s01 = _mm256_fmadd_pd(x0, y1, s01);
        s02 = _mm256_fmadd_pd(x0, y2, s02);
        s03 = _mm256_fmadd_pd(x0, y3, s03);
        s10 = _mm256_fmadd_pd(x1, y0, s10);
        s11 = _mm256_fmadd_pd(x1, y1, s11);
        s12 = _mm256_fmadd_pd(x1, y2, s12);
        s13 = _mm256_fmadd_pd(x1, y3, s13);
      }
      double r00 = hsum(s00), r01 = hsum(s01), r02 = hsum(s02), r03 = hsum(s03);
      double r10 = hsum(s10), r11 = hsum(s11), r12 = hsum(s12), r13 = hsum(s13);
      for (; q < p; ++q) {
        r00 += a0[q] * b0[q];
        r01 += a0[q] * b1[q];
        r02 += a0[q] * b2[q];
        r03 += a0[q] * b3[q];
        r10 += a1[q] * b0[q];
        r11 += a1[q] * b1[q];
        r12 += a1[q] * b2[q];
        r13 += a1[q] * b3[q];
      }
      double* c0 = c + i * ldc + j;
      double* c1 = c0 + ldc;
      c0[0] += r00;
      c0[1] += r01;
      c0[2] += r02;
      c0[3] += r03;
      c1[0] += r10;
      c1[1] += r11;
      c1[2] += r12;
      c1[3] += r13;
    }
    for (; j < n; ++j) {
      const double* bj = b + j * ldb;
      c[i * ldc + j] += dot(a0, bj, p);
      c[(i + 1) * ldc + j] += dot(a1, bj, p);
    }
  }
  for (; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] += dot(a + i * lda, b + j * ldb, p);
  }
}

}  // namespace cae::kernels::avx2
