#include "cae/kernels.hpp"

namespace cae::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * ldc;
    for (std::size_t q = 0; q < p; ++q) {
      const double aiq = a[i * lda + q];
      const double* bq = b + q * ldb;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aiq * bq[j];
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t q = 0; q < p; ++q) {
    const double* aq = a + q * lda;
    const double* bq = b + q * ldb;
    for (std::size_t i = 0; i < m; ++i) {
      const double aqi = aq[i];
      double* ci = c + i * ldc;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aqi * bq[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] += dot(a + i * lda, b + j * ldb, p);
  }
}

}  // namespace cae::kernels::scalar
