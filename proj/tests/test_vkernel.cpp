#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "figure_suite.hpp"
#include "simdrt/vkernel.hpp"

using namespace simdrt;
using simdrt::vk::Mask;

template <class B>
class FigureSuite : public ::testing::Test {};
using FourLane = ::testing::Types<vk::Emulated<4>, vk::Counting<vk::Emulated<4>>>;
TYPED_TEST_SUITE(FigureSuite, FourLane);

TYPED_TEST(FigureSuite, WorkedExamplesVerbatim) {
  const auto fails = simdrt::testing::figure_suite<TypeParam>();
  for (const auto& f : fails) ADD_FAILURE() << f;
}

TEST(MaskStrings, LaneZeroIsLeftmost) {
  EXPECT_EQ(vk::mask_to_string(0b0110u, 4), "0110");
  EXPECT_EQ(vk::mask_to_string(0b0001u, 4), "1000");
  EXPECT_EQ(vk::mask_from_string("1000"), 0b0001u);
  EXPECT_EQ(vk::mask_from_string("0111"), 0b1110u);
  for (Mask m = 0; m < 16; ++m) EXPECT_EQ(vk::mask_from_string(vk::mask_to_string(m, 4)), m);
}

TEST(MaskHelpers, CompactPairsAndsAdjacentBits) {
  EXPECT_EQ(vk::compact_pairs(0b11'01'11'10u), 0b1010u);
  EXPECT_EQ(vk::compact_pairs(0xffffu), 0xffu);
  EXPECT_EQ(vk::compact_pairs(0x5555u), 0u);
  std::mt19937 rng(1);
  for (int r = 0; r < 1000; ++r) {
    const Mask m = rng() & 0xffffu;
    Mask want = 0;
    for (int i = 0; i < 8; ++i) {
      if (((m >> (2 * i)) & 1u) && ((m >> (2 * i + 1)) & 1u)) want |= 1u << i;
    }
    EXPECT_EQ(vk::compact_pairs(m), want);
  }
}

// ---------------------------------------------------------------------------
// Property tests at every supported width.

template <class B>
class KernelProperties : public ::testing::Test {};
using AllEmulated = ::testing::Types<vk::Emulated<4>, vk::Emulated<8>, vk::Emulated<16>,
                                     vk::Counting<vk::Emulated<16>>>;
TYPED_TEST_SUITE(KernelProperties, AllEmulated);

TYPED_TEST(KernelProperties, LoadGatherExpandMatchScalar) {
  using B = TypeParam;
  constexpr int W = B::lanes;
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(-1, 1);
  for (int r = 0; r < 200; ++r) {
    std::vector<float> mem(3 * W);
    for (float& x : mem) x = u(rng);
    const std::size_t off = rng() % (2 * W + 1);
    const auto l = B::to_array(vk::v_load<B>(mem, off));
    for (int k = 0; k < W; ++k) EXPECT_EQ(l[k], mem[off + k]);

    std::array<std::int32_t, W> idx;
    for (auto& x : idx) x = static_cast<std::int32_t>(rng() % mem.size());
    const auto gth = B::to_array(vk::v_gather<B>(B::ifrom_array(idx), mem));
    for (int k = 0; k < W; ++k) EXPECT_EQ(gth[k], mem[idx[k]]);

    const Mask m = rng() & B::full;
    const auto ex = B::to_array(vk::v_expand_load<B>(m, mem, off));
    int next = 0;
    for (int k = 0; k < W; ++k) {
      if ((m >> k) & 1u) {
        EXPECT_EQ(ex[k], mem[off + next++]);
      }
    }
  }
}

TYPED_TEST(KernelProperties, AllOnesExpandEqualsLoad) {
  using B = TypeParam;
  std::vector<float> mem(B::lanes);
  for (int k = 0; k < B::lanes; ++k) mem[k] = static_cast<float>(k * 3 + 1);
  EXPECT_EQ(B::to_array(vk::v_expand_load<B>(B::full, mem, 0)), B::to_array(vk::v_load<B>(mem, 0)));
}

TYPED_TEST(KernelProperties, CompressStoreIsStableFilter) {
  using B = TypeParam;
  constexpr int W = B::lanes;
  std::mt19937 rng(12);
  for (int r = 0; r < 200; ++r) {
    std::array<float, W> v;
    for (int k = 0; k < W; ++k) v[k] = static_cast<float>(rng() % 100);
    const Mask m = rng() & B::full;
    std::vector<float> out(W, -1.0f);
    const int n = vk::v_compress_store<B>(m, B::from_array(v), out, 0);
    std::vector<float> want;
    for (int k = 0; k < W; ++k) {
      if ((m >> k) & 1u) want.push_back(v[k]);
    }
    ASSERT_EQ(n, static_cast<int>(want.size()));
    for (int k = 0; k < n; ++k) EXPECT_EQ(out[k], want[k]);
    for (int k = n; k < W; ++k) EXPECT_EQ(out[k], -1.0f);
  }
}

TYPED_TEST(KernelProperties, PermuteBlendCompareMaskedAdd) {
  using B = TypeParam;
  constexpr int W = B::lanes;
  std::mt19937 rng(13);
  for (int r = 0; r < 200; ++r) {
    std::array<float, W> a, b;
    std::array<std::int32_t, W> idx, ident;
    for (int k = 0; k < W; ++k) {
      a[k] = static_cast<float>(rng() % 7);
      b[k] = static_cast<float>(rng() % 7);
      idx[k] = static_cast<std::int32_t>(rng() % W);
      ident[k] = k;
    }
    const auto va = B::from_array(a), vb = B::from_array(b);
    const Mask m = rng() & B::full;

    const auto p = B::to_array(vk::v_permute<B>(B::ifrom_array(idx), va));
    for (int k = 0; k < W; ++k) EXPECT_EQ(p[k], a[idx[k]]);
    EXPECT_EQ(B::to_array(vk::v_permute<B>(B::ifrom_array(ident), va)), a);

    const auto bl = B::to_array(vk::v_blend<B>(m, va, vb));
    for (int k = 0; k < W; ++k) EXPECT_EQ(bl[k], ((m >> k) & 1u) ? b[k] : a[k]);
    EXPECT_EQ(B::to_array(vk::v_blend<B>(m, va, va)), a);

    const Mask ge = vk::v_compare<B>(vk::Cmp::ge, va, vb);
    const Mask lt = vk::v_compare<B>(vk::Cmp::lt, va, vb);
    const Mask le = vk::v_compare<B>(vk::Cmp::le, va, vb);
    const Mask gt = vk::v_compare<B>(vk::Cmp::gt, va, vb);
    const Mask eq = vk::v_compare<B>(vk::Cmp::eq, va, vb);
    for (int k = 0; k < W; ++k) {
      EXPECT_EQ((ge >> k) & 1u, a[k] >= b[k] ? 1u : 0u);
      EXPECT_EQ((lt >> k) & 1u, a[k] < b[k] ? 1u : 0u);
      EXPECT_EQ((le >> k) & 1u, a[k] <= b[k] ? 1u : 0u);
      EXPECT_EQ((gt >> k) & 1u, a[k] > b[k] ? 1u : 0u);
      EXPECT_EQ((eq >> k) & 1u, a[k] == b[k] ? 1u : 0u);
    }
    EXPECT_EQ(vk::v_compare<B>(vk::Cmp::eq, va, va), B::full);

    const auto ma = B::to_array(vk::v_masked_add<B>(m, va, vb));
    for (int k = 0; k < W; ++k) EXPECT_EQ(ma[k], ((m >> k) & 1u) ? a[k] + b[k] : a[k]);
    EXPECT_EQ(B::to_array(vk::v_masked_add<B>(0, va, vb)), a);
  }
}

TYPED_TEST(KernelProperties, BroadcastPairAlternates) {
  using B = TypeParam;
  std::array<float, B::lanes> v{};
  for (int k = 0; k < B::lanes; ++k) v[k] = static_cast<float>(k + 10);
  const auto r = B::to_array(vk::v_broadcast_pair<B>(B::from_array(v)));
  for (int k = 0; k < B::lanes; ++k) EXPECT_EQ(r[k], v[k % 2]);
}

TYPED_TEST(KernelProperties, StoreLoadRoundTrip) {
  using B = TypeParam;
  std::array<float, B::lanes> v{};
  for (int k = 0; k < B::lanes; ++k) v[k] = static_cast<float>(k) * 0.5f;
  std::vector<float> mem(B::lanes + 3, 0.0f);
  vk::v_store<B>(B::from_array(v), mem, 3);
  EXPECT_EQ(B::to_array(vk::v_load<B>(mem, 3)), v);
}

TYPED_TEST(KernelProperties, MaskBitOrderRoundTrip) {
  // load -> compare -> compress_store agrees with the scalar filter over memory order
  using B = TypeParam;
  constexpr int W = B::lanes;
  std::mt19937 rng(14);
  for (int r = 0; r < 100; ++r) {
    std::vector<float> mem(W);
    for (float& x : mem) x = static_cast<float>(rng() % 10);
    const float thr = static_cast<float>(rng() % 10);
    const auto v = vk::v_load<B>(mem, 0);
    const Mask m = vk::v_compare<B>(vk::Cmp::ge, v, vk::v_broadcast<B>(thr));
    std::vector<float> out(W);
    const int n = vk::v_compress_store<B>(m, v, out, 0);
    std::vector<float> want;
    for (float x : mem) {
      if (x >= thr) want.push_back(x);
    }
    out.resize(static_cast<std::size_t>(n));
    EXPECT_EQ(out, want);
  }
}

TYPED_TEST(KernelProperties, IntegerAndReferenceOps) {
  using B = TypeParam;
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  std::array<std::int32_t, W> a, b;
  for (int k = 0; k < W; ++k) {
    a[k] = k;
    b[k] = 100 + k;
  }
  const Mask m = 0b0101u & B::full;
  const auto bl = B::ito_array(B::iblend(m, B::ifrom_array(a), B::ifrom_array(b)));
  const auto ad = B::ito_array(B::imasked_add(m, B::ifrom_array(a), B::ifrom_array(b)));
  for (int k = 0; k < W; ++k) {
    EXPECT_EQ(bl[k], ((m >> k) & 1u) ? b[k] : a[k]);
    EXPECT_EQ(ad[k], ((m >> k) & 1u) ? a[k] + b[k] : a[k]);
  }
  std::array<std::uint64_t, Wr> refs;
  for (int k = 0; k < Wr; ++k) refs[k] = 1000u + static_cast<std::uint64_t>(k);
  const auto rv = B::load_refs(refs.data());
  std::array<std::uint64_t, Wr> out{};
  EXPECT_EQ(B::compress_store_refs(0b10u, rv, out.data()), 1);
  EXPECT_EQ(out[0], 1001u);
  const auto dup = B::rto_array(B::dup_ref(rv, Wr - 1));
  for (auto x : dup) EXPECT_EQ(x, 1000u + Wr - 1);
}

// ---------------------------------------------------------------------------

using E4 = vk::Emulated<4>;

TEST(KernelBounds, OutOfRangeAccessThrows) {
  std::vector<float> mem(6, 1.0f);
  EXPECT_THROW(vk::v_load<E4>(mem, 3), std::out_of_range);
  EXPECT_NO_THROW(vk::v_load<E4>(mem, 2));
  EXPECT_THROW(vk::v_gather<E4>(E4::ifrom_array({0, 1, 6, 2}), mem), std::out_of_range);
  EXPECT_THROW(vk::v_gather<E4>(E4::ifrom_array({0, -1, 2, 2}), mem), std::out_of_range);
  EXPECT_THROW(vk::v_expand_load<E4>(0b1111u, mem, 3), std::out_of_range);
  EXPECT_NO_THROW(vk::v_expand_load<E4>(0b0111u, mem, 3));
  EXPECT_THROW(vk::v_store<E4>(E4::broadcast(0), mem, 4), std::out_of_range);
  EXPECT_THROW(vk::v_compress_store<E4>(0b0111u, E4::broadcast(0), mem, 4), std::out_of_range);
  EXPECT_EQ(vk::v_compress_store<E4>(0u, E4::broadcast(0), mem, 6), 0);
}

TEST(KernelBounds, PermuteRejectsBadLane) {
  EXPECT_THROW(vk::v_permute<E4>(E4::ifrom_array({0, 1, 4, 2}), E4::broadcast(1)), std::invalid_argument);
  EXPECT_THROW(vk::v_permute<E4>(E4::ifrom_array({0, -1, 2, 2}), E4::broadcast(1)), std::invalid_argument);
}

TEST(Counting, ResetThenSingleLoad) {
  using C = vk::Counting<E4>;
  vk::counter_reset();
  EXPECT_EQ(vk::counter_snapshot(), vk::OpCounts{});
  std::vector<float> mem(4, 0.0f);
  auto v = vk::v_load<C>(mem, 0);
  (void)v;
  vk::OpCounts want;
  want.loads = 1;
  EXPECT_EQ(vk::counter_snapshot(), want);
}

TEST(Counting, PrefetchesTallyAndAreInert) {
  using C = vk::Counting<E4>;
  vk::counter_reset();
  const float x = 3.0f;
  for (int k = 0; k < 7; ++k) vk::prefetch<C>(&x, sizeof x, vk::CacheLevel::l2);
  EXPECT_EQ(vk::counter_snapshot().prefetches, 7u);
  EXPECT_EQ(x, 3.0f);
}

TEST(Counting, TagsAttributeXlowCompares) {
  using C = vk::Counting<E4>;
  vk::counter_reset();
  const auto a = C::broadcast(1), b = C::broadcast(2);
  (void)C::compare<vk::Cmp::ge>(a, b, vk::Tag::xlow);
  (void)C::compare<vk::Cmp::ge>(a, b);
  const auto s = vk::counter_snapshot();
  EXPECT_EQ(s.compares, 2u);
  EXPECT_EQ(s.xlow_compares, 1u);
  EXPECT_EQ(s.broadcasts, 2u);
}

TEST(Counting, CountsAreNonDecreasing) {
  using C = vk::Counting<vk::Emulated<16>>;
  vk::counter_reset();
  std::vector<float> mem(32, 0.0f);
  vk::OpCounts prev = vk::counter_snapshot();
  for (int r = 0; r < 20; ++r) {
    (void)vk::v_load<C>(mem, r % 16);
    (void)C::broadcast(1.0f);
    const vk::OpCounts now = vk::counter_snapshot();
    EXPECT_GE(now.loads, prev.loads);
    EXPECT_GE(now.broadcasts, prev.broadcasts);
    prev = now;
  }
}

TEST(Counting, ThreadLocalTallies) {
  using C = vk::Counting<E4>;
  vk::counter_reset();
  (void)C::broadcast(1);
  std::uint64_t other = 99;
  std::thread t([&] {
    vk::counter_reset();
    other = vk::counter_snapshot().broadcasts;
    (void)C::broadcast(1);
    (void)C::broadcast(1);
  });
  t.join();
  EXPECT_EQ(other, 0u);
  EXPECT_EQ(vk::counter_snapshot().broadcasts, 1u);
}
