#include <atomic>

#include "decoh/error.hpp"
#include "decoh/simd/kernels.hpp"

namespace decoh::simd {

#ifndef DECOH_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
      return avx2_kernels() != nullptr && cpu_supports_avx2();
  }
  return false;
}

namespace {

const KernelTable* best_available() {
  if (available(Isa::Avx2)) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    table = best_available();
    g_active.store(table, std::memory_order_release);
  }
  return *table;
}

void select(Isa isa) {
  if (!available(isa)) {
    throw InvalidInput("kernel set '" + std::string(name(isa)) +
                       "' is not available on this build/CPU");
  }
  g_active.store(isa == Isa::Avx2 ? avx2_kernels() : &scalar_kernels(),
                 std::memory_order_release);
}

void reset_selection() { g_active.store(best_available(), std::memory_order_release); }

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace decoh::simd
