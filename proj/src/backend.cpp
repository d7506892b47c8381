#include "simdrt/backend.hpp"

#include <stdexcept>

namespace simdrt {

Backend parse_backend(std::string_view name) {
  if (name == "emulated") return Backend::emulated;
  if (name == "counting") return Backend::counting;
  if (name == "native") return Backend::native;
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (expected emulated, counting or native)");
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::emulated: return "emulated";
    case Backend::counting: return "counting";
    case Backend::native: return "native";
  }
  return "?";
}

bool native_available() {
#if defined(SIMDRT_HAVE_NATIVE) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512vl") &&
         __builtin_cpu_supports("avx512dq");
#else
  return false;
#endif
}

void require_native() {
  if (!native_available()) {
#if defined(SIMDRT_HAVE_NATIVE)
    throw std::runtime_error("native backend requested but this CPU lacks AVX-512F/VL/DQ");
#else
    throw std::runtime_error("native backend requested but it was not compiled in");
#endif
  }
}

vk::CacheLevel cache_level_from_int(int level) {
  switch (level) {
    case 2: return vk::CacheLevel::l2;
    case 3: return vk::CacheLevel::l3;
    default: return vk::CacheLevel::l1;
  }
}

}  // namespace simdrt
