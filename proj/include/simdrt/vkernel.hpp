#pragma once

// Abstract W-lane vector kernel. Every query operator is written against a
// backend policy type B exposing the same static operations:
//
//   Vec   W lanes of 32-bit floats        IVec  W lanes of int32
//   RVec  W/2 lanes of 64-bit references  Mask  one bit per lane, bit i = lane i
//
// Backends: Emulated<W> (portable loops), Counting<B> (tallies kernel
// invocations and forwards to B), Native<W> (AVX-512, see native.hpp).
// Unmasked lanes of expand_load are zero in every backend.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace simdrt::vk {

using Mask = std::uint32_t;

enum class Cmp { lt, le, gt, ge, eq };

enum class CacheLevel { l1, l2, l3 };

/// Attribution tag for compare tallies. `xlow` marks compares that test
/// outer.hi_x >= inner.lo_x during a join.
enum class Tag { none, xlow };

constexpr Mask lane_mask(int n) { return n >= 32 ? ~Mask{0} : ((Mask{1} << n) - 1); }

constexpr int popcount(Mask m) { return std::popcount(m); }

/// Collapses a W-lane mask over interleaved (x, y) pairs into one bit per pair:
/// bit i of the result = bit 2i AND bit 2i+1.
constexpr Mask compact_pairs(Mask m) {
  Mask x = m & (m >> 1) & 0x55555555u;
  x = (x | (x >> 1)) & 0x33333333u;
  x = (x | (x >> 2)) & 0x0f0f0f0fu;
  x = (x | (x >> 4)) & 0x00ff00ffu;
  x = (x | (x >> 8)) & 0x0000ffffu;
  return x;
}

/// Even-lane (x component) bits of a pair-interleaved mask.
constexpr Mask even_lanes(int w) { return 0x55555555u & lane_mask(w); }

/// Renders lane 0 leftmost, e.g. 0b0110 over 4 lanes -> "0110".
std::string mask_to_string(Mask m, int lanes);
Mask mask_from_string(std::string_view bits);

struct OpCounts {
  std::uint64_t loads = 0;
  std::uint64_t ref_loads = 0;
  std::uint64_t gathers = 0;
  std::uint64_t expand_loads = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t stores = 0;
  std::uint64_t compress_stores = 0;
  std::uint64_t permutes = 0;
  std::uint64_t blends = 0;
  std::uint64_t compares = 0;
  std::uint64_t xlow_compares = 0;  // subset of `compares`
  std::uint64_t masked_adds = 0;
  std::uint64_t prefetches = 0;

  friend bool operator==(const OpCounts&, const OpCounts&) = default;
  OpCounts operator-(const OpCounts& rhs) const;
};

namespace detail {
inline thread_local OpCounts tls_counts;
}  // namespace detail

/// Counters are per thread; each query thread owns its tally.
inline OpCounts counter_snapshot() { return detail::tls_counts; }
inline void counter_reset() { detail::tls_counts = OpCounts{}; }

template <int W>
struct Emulated {
  static_assert(W == 4 || W == 8 || W == 16, "lane count must be 4, 8 or 16");

  static constexpr int lanes = W;
  static constexpr int ref_lanes = W / 2;
  static constexpr Mask full = lane_mask(W);
  static constexpr Mask ref_full = lane_mask(W / 2);
  static constexpr std::string_view name = "emulated";

  using Vec = std::array<float, W>;
  using IVec = std::array<std::int32_t, W>;
  using RVec = std::array<std::uint64_t, W / 2>;

  // Lane access helpers for tests and scalar extraction; not kernel ops.
  static Vec from_array(const std::array<float, W>& a) { return a; }
  static std::array<float, W> to_array(const Vec& v) { return v; }
  static IVec ifrom_array(const std::array<std::int32_t, W>& a) { return a; }
  static std::array<std::int32_t, W> ito_array(const IVec& v) { return v; }
  static std::array<std::uint64_t, W / 2> rto_array(const RVec& v) { return v; }

  static Vec load(const float* mem) {
    Vec r;
    std::copy_n(mem, W, r.begin());
    return r;
  }

  static Vec gather(const IVec& idx, const float* base) {
    Vec r;
    for (int i = 0; i < W; ++i) r[i] = base[idx[i]];
    return r;
  }

  static Vec expand_load(Mask k, const float* mem) {
    Vec r{};
    int next = 0;
    for (int i = 0; i < W; ++i) {
      if ((k >> i) & 1u) r[i] = mem[next++];
    }
    return r;
  }

  static Vec broadcast(float e) {
    Vec r;
    r.fill(e);
    return r;
  }

  static Vec broadcast_pair(const Vec& v) {
    Vec r;
    for (int i = 0; i < W; ++i) r[i] = v[i & 1];
    return r;
  }

  static void store(const Vec& v, float* mem) { std::copy(v.begin(), v.end(), mem); }

  static int compress_store(Mask k, const Vec& v, float* mem) {
    int n = 0;
    for (int i = 0; i < W; ++i) {
      if ((k >> i) & 1u) mem[n++] = v[i];
    }
    return n;
  }

  static Vec permute(const IVec& idx, const Vec& v) {
    Vec r;
    for (int i = 0; i < W; ++i) r[i] = v[idx[i] & (W - 1)];
    return r;
  }

  static Vec blend(Mask k, const Vec& a, const Vec& b) {
    Vec r;
    for (int i = 0; i < W; ++i) r[i] = ((k >> i) & 1u) ? b[i] : a[i];
    return r;
  }

  template <Cmp C>
  static Mask compare(const Vec& a, const Vec& b, Tag = Tag::none) {
    Mask m = 0;
    for (int i = 0; i < W; ++i) {
      bool bit;
      if constexpr (C == Cmp::lt) bit = a[i] < b[i];
      else if constexpr (C == Cmp::le) bit = a[i] <= b[i];
      else if constexpr (C == Cmp::gt) bit = a[i] > b[i];
      else if constexpr (C == Cmp::ge) bit = a[i] >= b[i];
      else bit = a[i] == b[i];
      m |= Mask{bit} << i;
    }
    return m;
  }

  static Vec masked_add(Mask k, const Vec& a, const Vec& b) {
    Vec r;
    for (int i = 0; i < W; ++i) r[i] = ((k >> i) & 1u) ? a[i] + b[i] : a[i];
    return r;
  }

  static IVec ibroadcast(std::int32_t e) {
    IVec r;
    r.fill(e);
    return r;
  }

  static void istore(const IVec& v, std::int32_t* mem) { std::copy(v.begin(), v.end(), mem); }

  static IVec iblend(Mask k, const IVec& a, const IVec& b) {
    IVec r;
    for (int i = 0; i < W; ++i) r[i] = ((k >> i) & 1u) ? b[i] : a[i];
    return r;
  }

  static IVec imasked_add(Mask k, const IVec& a, const IVec& b) {
    IVec r;
    for (int i = 0; i < W; ++i) r[i] = ((k >> i) & 1u) ? a[i] + b[i] : a[i];
    return r;
  }

  static RVec load_refs(const std::uint64_t* mem) {
    RVec r;
    std::copy_n(mem, W / 2, r.begin());
    return r;
  }

  static int compress_store_refs(Mask k, const RVec& v, std::uint64_t* mem) {
    int n = 0;
    for (int i = 0; i < W / 2; ++i) {
      if ((k >> i) & 1u) mem[n++] = v[i];
    }
    return n;
  }

  static void store_refs(const RVec& v, std::uint64_t* mem) { std::copy(v.begin(), v.end(), mem); }

  /// Permute with a constant index vector: every lane takes v[lane].
  static RVec dup_ref(const RVec& v, int lane) {
    RVec r;
    r.fill(v[lane]);
    return r;
  }

  static void prefetch(const void*, std::size_t, CacheLevel) {}
};

template <class Inner>
struct Counting {
  static constexpr int lanes = Inner::lanes;
  static constexpr int ref_lanes = Inner::ref_lanes;
  static constexpr Mask full = Inner::full;
  static constexpr Mask ref_full = Inner::ref_full;
  static constexpr std::string_view name = "counting";

  using Vec = typename Inner::Vec;
  using IVec = typename Inner::IVec;
  using RVec = typename Inner::RVec;

  static Vec from_array(const std::array<float, lanes>& a) { return Inner::from_array(a); }
  static auto to_array(const Vec& v) { return Inner::to_array(v); }
  static IVec ifrom_array(const std::array<std::int32_t, lanes>& a) { return Inner::ifrom_array(a); }
  static auto ito_array(const IVec& v) { return Inner::ito_array(v); }
  static auto rto_array(const RVec& v) { return Inner::rto_array(v); }

  static Vec load(const float* mem) {
    ++detail::tls_counts.loads;
    return Inner::load(mem);
  }
  static Vec gather(const IVec& idx, const float* base) {
    ++detail::tls_counts.gathers;
    return Inner::gather(idx, base);
  }
  static Vec expand_load(Mask k, const float* mem) {
    ++detail::tls_counts.expand_loads;
    return Inner::expand_load(k, mem);
  }
  static Vec broadcast(float e) {
    ++detail::tls_counts.broadcasts;
    return Inner::broadcast(e);
  }
  static Vec broadcast_pair(const Vec& v) {
    ++detail::tls_counts.broadcasts;
    return Inner::broadcast_pair(v);
  }
  static void store(const Vec& v, float* mem) {
    ++detail::tls_counts.stores;
    Inner::store(v, mem);
  }
  static int compress_store(Mask k, const Vec& v, float* mem) {
    ++detail::tls_counts.compress_stores;
    return Inner::compress_store(k, v, mem);
  }
  static Vec permute(const IVec& idx, const Vec& v) {
    ++detail::tls_counts.permutes;
    return Inner::permute(idx, v);
  }
  static Vec blend(Mask k, const Vec& a, const Vec& b) {
    ++detail::tls_counts.blends;
    return Inner::blend(k, a, b);
  }
  template <Cmp C>
  static Mask compare(const Vec& a, const Vec& b, Tag tag = Tag::none) {
    ++detail::tls_counts.compares;
    if (tag == Tag::xlow) ++detail::tls_counts.xlow_compares;
    return Inner::template compare<C>(a, b, tag);
  }
  static Vec masked_add(Mask k, const Vec& a, const Vec& b) {
    ++detail::tls_counts.masked_adds;
    return Inner::masked_add(k, a, b);
  }
  static IVec ibroadcast(std::int32_t e) {
    ++detail::tls_counts.broadcasts;
    return Inner::ibroadcast(e);
  }
  static void istore(const IVec& v, std::int32_t* mem) {
    ++detail::tls_counts.stores;
    Inner::istore(v, mem);
  }
  static IVec iblend(Mask k, const IVec& a, const IVec& b) {
    ++detail::tls_counts.blends;
    return Inner::iblend(k, a, b);
  }
  static IVec imasked_add(Mask k, const IVec& a, const IVec& b) {
    ++detail::tls_counts.masked_adds;
    return Inner::imasked_add(k, a, b);
  }
  static RVec load_refs(const std::uint64_t* mem) {
    ++detail::tls_counts.ref_loads;
    return Inner::load_refs(mem);
  }
  static int compress_store_refs(Mask k, const RVec& v, std::uint64_t* mem) {
    ++detail::tls_counts.compress_stores;
    return Inner::compress_store_refs(k, v, mem);
  }
  static void store_refs(const RVec& v, std::uint64_t* mem) {
    ++detail::tls_counts.stores;
    Inner::store_refs(v, mem);
  }
  static RVec dup_ref(const RVec& v, int lane) {
    ++detail::tls_counts.permutes;
    return Inner::dup_ref(v, lane);
  }
  static void prefetch(const void* p, std::size_t bytes, CacheLevel level) {
    ++detail::tls_counts.prefetches;
    Inner::prefetch(p, bytes, level);
  }
};

// ---------------------------------------------------------------------------
// Bounds-checked entry points over spans. The query operators call the
// backend directly on node storage whose extent is guaranteed by layout.

template <class B>
typename B::Vec v_load(std::span<const float> mem, std::size_t offset) {
  if (offset > mem.size() || mem.size() - offset < B::lanes) {
    throw std::out_of_range("v_load: offset + W exceeds array length");
  }
  return B::load(mem.data() + offset);
}

template <class B>
typename B::Vec v_gather(const typename B::IVec& idx, std::span<const float> mem) {
  for (std::int32_t i : B::ito_array(idx)) {
    if (i < 0 || static_cast<std::size_t>(i) >= mem.size()) {
      throw std::out_of_range("v_gather: index outside array");
    }
  }
  return B::gather(idx, mem.data());
}

template <class B>
typename B::Vec v_expand_load(Mask k, std::span<const float> mem, std::size_t offset) {
  k &= B::full;
  if (offset > mem.size() || mem.size() - offset < static_cast<std::size_t>(popcount(k))) {
    throw std::out_of_range("v_expand_load: not enough elements for mask");
  }
  return B::expand_load(k, mem.data() + offset);
}

template <class B>
typename B::Vec v_broadcast(float e) {
  return B::broadcast(e);
}

template <class B>
typename B::Vec v_broadcast_pair(const typename B::Vec& v) {
  return B::broadcast_pair(v);
}

template <class B>
void v_store(const typename B::Vec& v, std::span<float> mem, std::size_t offset) {
  if (offset > mem.size() || mem.size() - offset < B::lanes) {
    throw std::out_of_range("v_store: offset + W exceeds array length");
  }
  B::store(v, mem.data() + offset);
}

template <class B>
int v_compress_store(Mask k, const typename B::Vec& v, std::span<float> mem, std::size_t offset) {
  k &= B::full;
  if (offset > mem.size() || mem.size() - offset < static_cast<std::size_t>(popcount(k))) {
    throw std::out_of_range("v_compress_store: not enough room for masked lanes");
  }
  return B::compress_store(k, v, mem.data() + offset);
}

template <class B>
typename B::Vec v_permute(const typename B::IVec& idx, const typename B::Vec& v) {
  for (std::int32_t i : B::ito_array(idx)) {
    if (i < 0 || i >= B::lanes) throw std::invalid_argument("v_permute: lane index out of range");
  }
  return B::permute(idx, v);
}

template <class B>
typename B::Vec v_blend(Mask k, const typename B::Vec& a, const typename B::Vec& b) {
  return B::blend(k & B::full, a, b);
}

template <class B>
Mask v_compare(Cmp op, const typename B::Vec& a, const typename B::Vec& b) {
  switch (op) {
    case Cmp::lt: return B::template compare<Cmp::lt>(a, b);
    case Cmp::le: return B::template compare<Cmp::le>(a, b);
    case Cmp::gt: return B::template compare<Cmp::gt>(a, b);
    case Cmp::ge: return B::template compare<Cmp::ge>(a, b);
    case Cmp::eq: return B::template compare<Cmp::eq>(a, b);
  }
  throw std::invalid_argument("v_compare: unknown comparator");
}

template <class B>
typename B::Vec v_masked_add(Mask k, const typename B::Vec& a, const typename B::Vec& b) {
  return B::masked_add(k & B::full, a, b);
}

/// Advisory; never changes results.
template <class B>
void prefetch(const void* node, std::size_t bytes, CacheLevel level = CacheLevel::l1) {
  B::prefetch(node, bytes, level);
}

}  // namespace simdrt::vk
