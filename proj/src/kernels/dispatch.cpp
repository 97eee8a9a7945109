#include <atomic>

#include "gwas/errors.hpp"
#include "gwas/kernels.hpp"

namespace gwas::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::scalar, scalar::dot, scalar::weighted_dot, scalar::decode,
                                   scalar::count_codes};
#ifdef GWAS_HAVE_AVX2
constexpr KernelTable kAvx2Table{Isa::avx2, avx2::dot, avx2::weighted_dot, avx2::decode, avx2::count_codes};
#endif

bool cpu_has_avx2() {
#if defined(GWAS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> selected{&table(detect())};
  return selected;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2()); }

const KernelTable& table(Isa isa) {
#ifdef GWAS_HAVE_AVX2
  if (isa == Isa::avx2) {
    if (!cpu_has_avx2()) throw ArgumentError("avx2 kernels are not supported on this CPU");
    return kAvx2Table;
  }
#else
  if (isa == Isa::avx2) throw ArgumentError("avx2 kernels were not compiled into this build");
#endif
  return kScalarTable;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void force_isa(Isa isa) { current().store(&table(isa), std::memory_order_release); }

void reset_isa() { current().store(&table(detect()), std::memory_order_release); }

}  // namespace gwas::kernels
