#include "simdrt/vkernel.hpp"

namespace simdrt::vk {

std::string mask_to_string(Mask m, int lanes) {
  std::string s(static_cast<std::size_t>(lanes), '0');
  for (int i = 0; i < lanes; ++i) {
    if ((m >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

Mask mask_from_string(std::string_view bits) {
  if (bits.size() > 32) throw std::invalid_argument("mask_from_string: more than 32 lanes");
  Mask m = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') m |= Mask{1} << i;
    else if (bits[i] != '0') throw std::invalid_argument("mask_from_string: expected 0 or 1");
  }
  return m;
}

OpCounts OpCounts::operator-(const OpCounts& rhs) const {
  OpCounts d;
  d.loads = loads - rhs.loads;
  d.ref_loads = ref_loads - rhs.ref_loads;
  d.gathers = gathers - rhs.gathers;
  d.expand_loads = expand_loads - rhs.expand_loads;
  d.broadcasts = broadcasts - rhs.broadcasts;
  d.stores = stores - rhs.stores;
  d.compress_stores = compress_stores - rhs.compress_stores;
  d.permutes = permutes - rhs.permutes;
  d.blends = blends - rhs.blends;
  d.compares = compares - rhs.compares;
  d.xlow_compares = xlow_compares - rhs.xlow_compares;
  d.masked_adds = masked_adds - rhs.masked_adds;
  d.prefetches = prefetches - rhs.prefetches;
  return d;
}

}  // namespace simdrt::vk
