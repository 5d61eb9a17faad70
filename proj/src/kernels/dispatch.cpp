#include <atomic>
#include <cstdlib>
#include <string>

#include "absorbing/errors.hpp"
#include "absorbing/kernels.hpp"

namespace absorbing::kernels {
namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable& detect() {
  if (const char* env = std::getenv("ABSORBING_ISA")) {
    const std::string name(env);
    if (name == "scalar") return scalar_table();
    if (name == "avx2" && isa_available(Isa::Avx2)) return table_for(Isa::Avx2);
    if (name == "neon" && isa_available(Isa::Neon)) return table_for(Isa::Neon);
  }
  if (isa_available(Isa::Avx2)) return table_for(Isa::Avx2);
  if (isa_available(Isa::Neon)) return table_for(Isa::Neon);
  return scalar_table();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel ISA not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return avx2_table();
#endif
#if defined(__aarch64__)
    case Isa::Neon: return neon_table();
#endif
    default: return scalar_table();
  }
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force_isa(Isa isa) { g_active.store(&table_for(isa), std::memory_order_release); }

void reset_isa() { g_active.store(&detect(), std::memory_order_release); }

}  // namespace absorbing::kernels
