#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "simdrt/join_kernels.hpp"

using namespace simdrt;

namespace {

std::int32_t count_le(std::span<const float> lo_x, float hx) {
  return static_cast<std::int32_t>(std::count_if(lo_x.begin(), lo_x.end(), [&](float v) { return v <= hx; }));
}

template <class B>
void random_cases(std::uint32_t fanout, int rounds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int r = 0; r < rounds; ++r) {
    const std::uint32_t n_in = 1 + static_cast<std::uint32_t>(rng() % fanout);
    std::vector<float> lo(n_in);
    // coarse grid so ties and exact hits are common
    for (float& v : lo) v = std::floor(u(rng) * 16.0f) / 16.0f;
    std::sort(lo.begin(), lo.end());
    std::array<float, B::lanes> hx;
    for (float& v : hx) v = std::floor(u(rng) * 18.0f - 1.0f) / 16.0f;
    const auto res = flip_search<B>(B::from_array(hx), lo, fanout);
    ASSERT_EQ(res.trace.size(), static_cast<std::size_t>(std::countr_zero(fanout) + 1));
    for (int i = 0; i < B::lanes; ++i) {
      const std::int32_t want = count_le(lo, hx[i]);
      ASSERT_EQ(res.values[i], want) << "F=" << fanout << " lane " << i;
      ASSERT_EQ(((res.valid >> i) & 1u) != 0, want > 0);
    }
  }
}

}  // namespace

TEST(FlipSearch, WorkedTraceAtFourLanes) {
  using B = vk::Emulated<4>;
  const std::vector<float> lo = {1, 2, 3, 4};
  const auto res = flip_search<B>(B::from_array({3.5f, 2.5f, 2.5f, 3.5f}), lo, 4);
  ASSERT_EQ(res.trace.size(), 3u);
  const FlipStep& s0 = res.trace[0];
  EXPECT_EQ(s0.probes, (std::vector<std::int32_t>{2, 2, 2, 2}));
  EXPECT_EQ(vk::mask_to_string(s0.mask, 4), "1001");
  EXPECT_EQ(s0.flips, (std::vector<std::int32_t>{4, 2, 2, 4}));
  EXPECT_EQ(s0.next_probes, (std::vector<std::int32_t>{3, 1, 1, 3}));
  EXPECT_EQ(res.values, (std::array<std::int32_t, 4>{3, 2, 2, 3}));
}

TEST(FlipSearch, AllQualifyGivesEntryCount) {
  using B = vk::Emulated<16>;
  for (std::uint32_t f : {4u, 16u, 64u, 256u}) {
    for (std::uint32_t n : {1u, f / 2, f - 1, f}) {
      std::vector<float> lo(n);
      for (std::uint32_t k = 0; k < n; ++k) lo[k] = static_cast<float>(k) / static_cast<float>(f);
      const auto res = flip_search<B>(B::broadcast(2.0f), lo, f);
      for (std::int32_t v : res.values) EXPECT_EQ(v, static_cast<std::int32_t>(n));
      EXPECT_EQ(res.valid, B::full);
    }
  }
}

TEST(FlipSearch, NoneQualifyIsUndefined) {
  using B = vk::Emulated<8>;
  const std::vector<float> lo = {0.5f, 0.6f, 0.7f};
  const auto res = flip_search<B>(B::broadcast(0.1f), lo, 16);
  for (std::int32_t v : res.values) EXPECT_EQ(v, 0);
  EXPECT_EQ(res.valid, 0u);
}

TEST(FlipSearch, RandomAgainstLinearCount) {
  random_cases<vk::Emulated<4>>(4, 2000, 1);
  random_cases<vk::Emulated<8>>(16, 2000, 2);
  random_cases<vk::Emulated<16>>(64, 2000, 3);
  random_cases<vk::Emulated<16>>(2048, 200, 4);
}

TEST(FlipSearch, CountsOneGatherAndCompareEachIteration) {
  using B = vk::Counting<vk::Emulated<16>>;
  for (std::uint32_t f : {4u, 16u, 64u, 256u}) {
    const auto s = FlipSchedule<B>::make(f);
    std::vector<float> lo(f, 0.5f);
    vk::counter_reset();
    flip_kernel<B>(B::broadcast(0.5f), lo.data(), s);
    const auto c = vk::counter_snapshot();
    const auto it = static_cast<std::uint64_t>(std::countr_zero(f) + 1);
    EXPECT_EQ(c.gathers, it);
    EXPECT_EQ(c.compares, it);
    EXPECT_EQ(c.xlow_compares, it);
    EXPECT_EQ(c.masked_adds, 2 * (it - 1));
  }
}

TEST(FlipSearch, RejectsBadInput) {
  using B = vk::Emulated<4>;
  const std::vector<float> unsorted = {0.3f, 0.1f};
  EXPECT_THROW(flip_search<B>(B::broadcast(0.5f), unsorted, 4), std::invalid_argument);
  const std::vector<float> too_many(5, 0.1f);
  EXPECT_THROW(flip_search<B>(B::broadcast(0.5f), too_many, 4), std::invalid_argument);
  EXPECT_THROW(FlipSchedule<B>::make(12), std::invalid_argument);
}
