#include <cstdlib>
#include <string_view>

#include "venation/kernels.hpp"

namespace venation::kernels {

#if defined(VENATION_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table_impl();
}
#endif

const KernelTable* avx2_table() {
#if defined(VENATION_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* select_default() {
  const char* env = std::getenv("VENATION_KERNELS");
  if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable*& current() {
  static const KernelTable* table = select_default();
  return table;
}

}  // namespace

const KernelTable& active() { return *current(); }

void set_active(const KernelTable& table) { current() = &table; }

}  // namespace venation::kernels
