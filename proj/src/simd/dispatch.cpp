#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace winter::simd {

namespace {

std::atomic<const KernelTable*> g_selected{nullptr};

const KernelTable* default_table() {
  const char* env = std::getenv("WINTER_SIMD");
  if (env && std::string_view(env) == "scalar") return &detail::kScalarTable;
  const KernelTable* fast = avx2_kernels();
  return fast ? fast : &detail::kScalarTable;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(WINTER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  const KernelTable* t = g_selected.load(std::memory_order_acquire);
  if (t) return *t;
  static const KernelTable* fallback = default_table();
  return *fallback;
}

bool select_kernels(std::string_view name) {
  const KernelTable* t = nullptr;
  if (name == "scalar") t = &detail::kScalarTable;
  else if (name == "avx2") t = avx2_kernels();
  if (!t) return false;
  g_selected.store(t, std::memory_order_release);
  return true;
}

}  // namespace winter::simd
