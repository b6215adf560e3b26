#include <atomic>
#include <cstdlib>
#include <string>

#include "cae/errors.hpp"
#include "cae/kernels.hpp"

namespace cae::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::scalar,      scalar::dot,     scalar::axpy,   scalar::sum_sq_diff,
                                   scalar::gemm_nn, scalar::gemm_tn, scalar::gemm_nt};

#if defined(CAE_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::avx2,      avx2::dot,     avx2::axpy,   avx2::sum_sq_diff,
                                 avx2::gemm_nn, avx2::gemm_tn, avx2::gemm_nt};
#endif

bool cpu_has_avx2() noexcept {
#if defined(CAE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() noexcept {
  if (const char* env = std::getenv("CAE_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return &kScalarTable;
  }
#if defined(CAE_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2Table;
#endif
  return &kScalarTable;
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{pick_default()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw ParameterError("kernel variant '" + std::string(isa_name(isa)) + "' is not available on this CPU/build");
  }
#if defined(CAE_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

}  // namespace cae::kernels
