#pragma once

// AVX-512 backend. Only include from translation units compiled with
// -mavx512f -mavx512vl -mavx512dq, and only call after native_available().

#if !defined(__AVX512F__) || !defined(__AVX512VL__) || !defined(__AVX512DQ__)
#error "native.hpp requires AVX-512F/VL/DQ code generation"
#endif

#include <immintrin.h>

#include "simdrt/vkernel.hpp"

namespace simdrt::vk {

namespace native_detail {

template <Cmp C>
constexpr int cmp_imm() {
  if constexpr (C == Cmp::lt) return _CMP_LT_OQ;
  else if constexpr (C == Cmp::le) return _CMP_LE_OQ;
  else if constexpr (C == Cmp::gt) return _CMP_GT_OQ;
  else if constexpr (C == Cmp::ge) return _CMP_GE_OQ;
  else return _CMP_EQ_OQ;
}

inline void prefetch_lines(const void* p, std::size_t bytes, CacheLevel level) {
  const char* c = static_cast<const char*>(p);
  const std::size_t lines = bytes == 0 ? 1 : (bytes + 63) / 64;
  switch (level) {
    case CacheLevel::l2:
      for (std::size_t i = 0; i < lines; ++i) _mm_prefetch(c + 64 * i, _MM_HINT_T1);
      break;
    case CacheLevel::l3:
      for (std::size_t i = 0; i < lines; ++i) _mm_prefetch(c + 64 * i, _MM_HINT_T2);
      break;
    default:
      for (std::size_t i = 0; i < lines; ++i) _mm_prefetch(c + 64 * i, _MM_HINT_T0);
      break;
  }
}

}  // namespace native_detail

template <int W>
struct Native;

template <>
struct Native<16> {
  static constexpr int lanes = 16;
  static constexpr int ref_lanes = 8;
  static constexpr Mask full = lane_mask(16);
  static constexpr Mask ref_full = lane_mask(8);
  static constexpr std::string_view name = "native";

  using Vec = __m512;
  using IVec = __m512i;
  using RVec = __m512i;

  static Vec from_array(const std::array<float, 16>& a) { return _mm512_loadu_ps(a.data()); }
  static std::array<float, 16> to_array(Vec v) {
    std::array<float, 16> a;
    _mm512_storeu_ps(a.data(), v);
    return a;
  }
  static IVec ifrom_array(const std::array<std::int32_t, 16>& a) { return _mm512_loadu_si512(a.data()); }
  static std::array<std::int32_t, 16> ito_array(IVec v) {
    std::array<std::int32_t, 16> a;
    _mm512_storeu_si512(a.data(), v);
    return a;
  }
  static std::array<std::uint64_t, 8> rto_array(RVec v) {
    std::array<std::uint64_t, 8> a;
    _mm512_storeu_si512(a.data(), v);
    return a;
  }

  static Vec load(const float* mem) { return _mm512_loadu_ps(mem); }
  static Vec gather(IVec idx, const float* base) { return _mm512_i32gather_ps(idx, base, 4); }
  static Vec expand_load(Mask k, const float* mem) {
    return _mm512_maskz_expandloadu_ps(static_cast<__mmask16>(k), mem);
  }
  static Vec broadcast(float e) { return _mm512_set1_ps(e); }
  static Vec broadcast_pair(Vec v) { return _mm512_broadcast_f32x2(_mm512_castps512_ps128(v)); }
  static void store(Vec v, float* mem) { _mm512_storeu_ps(mem, v); }
  static int compress_store(Mask k, Vec v, float* mem) {
    _mm512_mask_compressstoreu_ps(mem, static_cast<__mmask16>(k), v);
    return popcount(k & full);
  }
  static Vec permute(IVec idx, Vec v) { return _mm512_permutexvar_ps(idx, v); }
  static Vec blend(Mask k, Vec a, Vec b) { return _mm512_mask_blend_ps(static_cast<__mmask16>(k), a, b); }
  template <Cmp C>
  static Mask compare(Vec a, Vec b, Tag = Tag::none) {
    return _mm512_cmp_ps_mask(a, b, native_detail::cmp_imm<C>());
  }
  static Vec masked_add(Mask k, Vec a, Vec b) {
    return _mm512_mask_add_ps(a, static_cast<__mmask16>(k), a, b);
  }

  static IVec ibroadcast(std::int32_t e) { return _mm512_set1_epi32(e); }
  static void istore(IVec v, std::int32_t* mem) { _mm512_storeu_si512(mem, v); }
  static IVec iblend(Mask k, IVec a, IVec b) {
    return _mm512_mask_blend_epi32(static_cast<__mmask16>(k), a, b);
  }
  static IVec imasked_add(Mask k, IVec a, IVec b) {
    return _mm512_mask_add_epi32(a, static_cast<__mmask16>(k), a, b);
  }

  static RVec load_refs(const std::uint64_t* mem) { return _mm512_loadu_si512(mem); }
  static int compress_store_refs(Mask k, RVec v, std::uint64_t* mem) {
    _mm512_mask_compressstoreu_epi64(mem, static_cast<__mmask8>(k), v);
    return popcount(k & ref_full);
  }
  static void store_refs(RVec v, std::uint64_t* mem) { _mm512_storeu_si512(mem, v); }
  static RVec dup_ref(RVec v, int lane) { return _mm512_permutexvar_epi64(_mm512_set1_epi64(lane), v); }

  static void prefetch(const void* p, std::size_t bytes, CacheLevel level) {
    native_detail::prefetch_lines(p, bytes, level);
  }
};

template <>
struct Native<8> {
  static constexpr int lanes = 8;
  static constexpr int ref_lanes = 4;
  static constexpr Mask full = lane_mask(8);
  static constexpr Mask ref_full = lane_mask(4);
  static constexpr std::string_view name = "native";

  using Vec = __m256;
  using IVec = __m256i;
  using RVec = __m256i;

  static Vec from_array(const std::array<float, 8>& a) { return _mm256_loadu_ps(a.data()); }
  static std::array<float, 8> to_array(Vec v) {
    std::array<float, 8> a;
    _mm256_storeu_ps(a.data(), v);
    return a;
  }
  static IVec ifrom_array(const std::array<std::int32_t, 8>& a) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data()));
  }
  static std::array<std::int32_t, 8> ito_array(IVec v) {
    std::array<std::int32_t, 8> a;
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(a.data()), v);
    return a;
  }
  static std::array<std::uint64_t, 4> rto_array(RVec v) {
    std::array<std::uint64_t, 4> a;
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(a.data()), v);
    return a;
  }

  static Vec load(const float* mem) { return _mm256_loadu_ps(mem); }
  static Vec gather(IVec idx, const float* base) { return _mm256_i32gather_ps(base, idx, 4); }
  static Vec expand_load(Mask k, const float* mem) {
    return _mm256_maskz_expandloadu_ps(static_cast<__mmask8>(k), mem);
  }
  static Vec broadcast(float e) { return _mm256_set1_ps(e); }
  static Vec broadcast_pair(Vec v) { return _mm256_broadcast_f32x2(_mm256_castps256_ps128(v)); }
  static void store(Vec v, float* mem) { _mm256_storeu_ps(mem, v); }
  static int compress_store(Mask k, Vec v, float* mem) {
    _mm256_mask_compressstoreu_ps(mem, static_cast<__mmask8>(k), v);
    return popcount(k & full);
  }
  static Vec permute(IVec idx, Vec v) { return _mm256_permutexvar_ps(idx, v); }
  static Vec blend(Mask k, Vec a, Vec b) { return _mm256_mask_blend_ps(static_cast<__mmask8>(k), a, b); }
  template <Cmp C>
  static Mask compare(Vec a, Vec b, Tag = Tag::none) {
    return _mm256_cmp_ps_mask(a, b, native_detail::cmp_imm<C>());
  }
  static Vec masked_add(Mask k, Vec a, Vec b) {
    return _mm256_mask_add_ps(a, static_cast<__mmask8>(k), a, b);
  }

  static IVec ibroadcast(std::int32_t e) { return _mm256_set1_epi32(e); }
  static void istore(IVec v, std::int32_t* mem) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(mem), v);
  }
  static IVec iblend(Mask k, IVec a, IVec b) {
    return _mm256_mask_blend_epi32(static_cast<__mmask8>(k), a, b);
  }
  static IVec imasked_add(Mask k, IVec a, IVec b) {
    return _mm256_mask_add_epi32(a, static_cast<__mmask8>(k), a, b);
  }

  static RVec load_refs(const std::uint64_t* mem) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mem));
  }
  static int compress_store_refs(Mask k, RVec v, std::uint64_t* mem) {
    _mm256_mask_compressstoreu_epi64(mem, static_cast<__mmask8>(k & ref_full), v);
    return popcount(k & ref_full);
  }
  static void store_refs(RVec v, std::uint64_t* mem) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(mem), v);
  }
  static RVec dup_ref(RVec v, int lane) {
    return _mm256_permutexvar_epi64(_mm256_set1_epi64x(lane), v);
  }

  static void prefetch(const void* p, std::size_t bytes, CacheLevel level) {
    native_detail::prefetch_lines(p, bytes, level);
  }
};

template <>
struct Native<4> {
  static constexpr int lanes = 4;
  static constexpr int ref_lanes = 2;
  static constexpr Mask full = lane_mask(4);
  static constexpr Mask ref_full = lane_mask(2);
  static constexpr std::string_view name = "native";

  using Vec = __m128;
  using IVec = __m128i;
  using RVec = __m128i;

  static Vec from_array(const std::array<float, 4>& a) { return _mm_loadu_ps(a.data()); }
  static std::array<float, 4> to_array(Vec v) {
    std::array<float, 4> a;
    _mm_storeu_ps(a.data(), v);
    return a;
  }
  static IVec ifrom_array(const std::array<std::int32_t, 4>& a) {
    return _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.data()));
  }
  static std::array<std::int32_t, 4> ito_array(IVec v) {
    std::array<std::int32_t, 4> a;
    _mm_storeu_si128(reinterpret_cast<__m128i*>(a.data()), v);
    return a;
  }
  static std::array<std::uint64_t, 2> rto_array(RVec v) {
    std::array<std::uint64_t, 2> a;
    _mm_storeu_si128(reinterpret_cast<__m128i*>(a.data()), v);
    return a;
  }

  static Vec load(const float* mem) { return _mm_loadu_ps(mem); }
  static Vec gather(IVec idx, const float* base) { return _mm_i32gather_ps(base, idx, 4); }
  static Vec expand_load(Mask k, const float* mem) {
    return _mm_maskz_expandloadu_ps(static_cast<__mmask8>(k & full), mem);
  }
  static Vec broadcast(float e) { return _mm_set1_ps(e); }
  static Vec broadcast_pair(Vec v) { return _mm_castpd_ps(_mm_movedup_pd(_mm_castps_pd(v))); }
  static void store(Vec v, float* mem) { _mm_storeu_ps(mem, v); }
  static int compress_store(Mask k, Vec v, float* mem) {
    _mm_mask_compressstoreu_ps(mem, static_cast<__mmask8>(k & full), v);
    return popcount(k & full);
  }
  static Vec permute(IVec idx, Vec v) { return _mm_permutevar_ps(v, idx); }
  static Vec blend(Mask k, Vec a, Vec b) {
    return _mm_mask_blend_ps(static_cast<__mmask8>(k & full), a, b);
  }
  template <Cmp C>
  static Mask compare(Vec a, Vec b, Tag = Tag::none) {
    return _mm_cmp_ps_mask(a, b, native_detail::cmp_imm<C>());
  }
  static Vec masked_add(Mask k, Vec a, Vec b) {
    return _mm_mask_add_ps(a, static_cast<__mmask8>(k & full), a, b);
  }

  static IVec ibroadcast(std::int32_t e) { return _mm_set1_epi32(e); }
  static void istore(IVec v, std::int32_t* mem) { _mm_storeu_si128(reinterpret_cast<__m128i*>(mem), v); }
  static IVec iblend(Mask k, IVec a, IVec b) {
    return _mm_mask_blend_epi32(static_cast<__mmask8>(k & full), a, b);
  }
  static IVec imasked_add(Mask k, IVec a, IVec b) {
    return _mm_mask_add_epi32(a, static_cast<__mmask8>(k & full), a, b);
  }

  static RVec load_refs(const std::uint64_t* mem) {
    return _mm_loadu_si128(reinterpret_cast<const __m128i*>(mem));
  }
  static int compress_store_refs(Mask k, RVec v, std::uint64_t* mem) {
    _mm_mask_compressstoreu_epi64(mem, static_cast<__mmask8>(k & ref_full), v);
    return popcount(k & ref_full);
  }
  static void store_refs(RVec v, std::uint64_t* mem) {
    _mm_storeu_si128(reinterpret_cast<__m128i*>(mem), v);
  }
  static RVec dup_ref(RVec v, int lane) {
    return lane == 0 ? _mm_unpacklo_epi64(v, v) : _mm_unpackhi_epi64(v, v);
  }

  static void prefetch(const void* p, std::size_t bytes, CacheLevel level) {
    native_detail::prefetch_lines(p, bytes, level);
  }
};

}  // namespace simdrt::vk
