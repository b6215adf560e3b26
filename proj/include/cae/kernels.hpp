#pragma once
// Data-parallel inner loops. Each kernel has a portable scalar reference
// implementation and, on x86-64, an AVX2/FMA variant. The active table is
// chosen once at startup from CPUID; CAE_SIMD=scalar forces the reference path.
//
// All matrices are row-major with an explicit leading dimension. The gemm
// kernels accumulate into C (C += op(A) * op(B)); callers zero C first when
// they want a plain product.

#include <cstddef>
#include <string_view>

namespace cae::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

using DotFn = double (*)(const double* a, const double* b, std::size_t n);
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);
using SumSqDiffFn = double (*)(const double* a, const double* b, std::size_t n);
// C[m x n] += A[m x p] * B[p x n]
using GemmNNFn = void (*)(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda,
                          const double* b, std::size_t ldb, double* c, std::size_t ldc);
// C[m x n] += A^T * B, A stored p x m, B stored p x n
using GemmTNFn = GemmNNFn;
// C[m x n] += A[m x p] * B^T, B stored n x p
using GemmNTFn = GemmNNFn;

struct KernelTable {
  Isa isa;
  DotFn dot;
  AxpyFn axpy;
  SumSqDiffFn sum_sq_diff;
  GemmNNFn gemm_nn;
  GemmTNFn gemm_tn;
  GemmNTFn gemm_nt;
};

// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

// Table for a specific variant. Throws ParameterError if unavailable.
const KernelTable& table(Isa isa);

// The table every numeric routine in the library dispatches through.
const KernelTable& active() noexcept;

// Overrides the runtime choice (tests and benchmarking). Throws if unavailable.
void set_active(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void gemm_nn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc);
void gemm_tn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc);
void gemm_nt(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc);
}  // namespace scalar

#if defined(CAE_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void gemm_nn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc);
void gemm_tn(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc);
void gemm_nt(std::size_t m, std::size_t n, std::size_t p, const double* a, std::size_t lda, const double* b,
             std::size_t ldb, double* c, std::size_t ldc);
}  // namespace avx2
#endif

}  // namespace cae::kernels
