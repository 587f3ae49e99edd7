#include "hdsvar/kernels.hpp"

#include <cstdio>
#include <cstdlib>

namespace hdsvar::kernels {

#if defined(HDSVAR_KERNELS_AVX2)
const Ops& avx2_ops();
#endif
#if defined(HDSVAR_KERNELS_NEON)
const Ops& neon_ops();
#endif

const std::vector<const Ops*>& available_ops() {
  static const std::vector<const Ops*> backends = [] {
    std::vector<const Ops*> v{&scalar_ops()};
#if defined(HDSVAR_KERNELS_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) v.push_back(&avx2_ops());
#endif
#if defined(HDSVAR_KERNELS_NEON)
    v.push_back(&neon_ops());
#endif
    return v;
  }();
  return backends;
}

const Ops* find_ops(const std::string& name) {
  for (const Ops* ops : available_ops())
    if (name == ops->name) return ops;
  return nullptr;
}

const Ops& active_ops() {
  static const Ops* chosen = [] {
    if (const char* env = std::getenv("HDSVAR_KERNELS")) {
      if (const Ops* ops = find_ops(env)) return ops;
      std::fprintf(stderr, "warning: HDSVAR_KERNELS=%s is not an available backend, using default\n",
                   env);
    }
    return available_ops().back();
  }();
  return *chosen;
}

}  // namespace hdsvar::kernels
