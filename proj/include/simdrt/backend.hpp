#pragma once

#include <string>
#include <string_view>

#include "simdrt/vkernel.hpp"

namespace simdrt {

/// Runtime backend choice for the W = 16 reference configuration.
/// `counting` wraps the emulated backend.
enum class Backend { emulated, counting, native };

/// Lane count used by the runtime-dispatched entry points.
inline constexpr int kReferenceLanes = 16;

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend b);

/// True when the native backend was compiled in and the CPU supports AVX-512F/VL/DQ.
bool native_available();

/// Throws std::runtime_error when the native backend cannot run here.
void require_native();

/// Maps a numeric prefetch hint (1, 2, 3) to a cache level; anything else is L1.
vk::CacheLevel cache_level_from_int(int level);

}  // namespace simdrt
