#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "simdrt/queue.hpp"
#include "simdrt/vkernel.hpp"

using namespace simdrt;

TEST(TraversalQueue, FifoOrder) {
  TraversalQueue q(16);
  for (std::uint64_t i = 0; i < 10; ++i) q.push(i);
  for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(q.pop(), i);
  EXPECT_TRUE(q.empty());
}

TEST(TraversalQueue, CapacityIsPowerOfTwoAndGrows) {
  TraversalQueue q(1000);
  EXPECT_EQ(q.capacity(), 1024u);
  EXPECT_EQ(TraversalQueue().capacity(), TraversalQueue::kInitialCapacity);
  for (std::uint64_t i = 0; i < 5000; ++i) q.push(i);
  EXPECT_GE(q.capacity(), 5000u);
  EXPECT_TRUE(std::has_single_bit(q.capacity()));
  for (std::uint64_t i = 0; i < 5000; ++i) ASSERT_EQ(q.pop(), i);
}

TEST(TraversalQueue, CompactsInsteadOfGrowingWhenMostlyConsumed) {
  TraversalQueue q(16);
  for (int round = 0; round < 1000; ++round) {
    q.push(static_cast<std::uint64_t>(round));
    q.push(static_cast<std::uint64_t>(round));
    q.pop();
    q.pop();
  }
  EXPECT_EQ(q.capacity(), 16u);
}

TEST(TraversalQueue, BatchedAppendMatchesModel) {
  using B = vk::Emulated<16>;
  TraversalQueue q(16);
  std::deque<std::uint64_t> model;
  std::mt19937_64 rng(3);
  std::uint64_t next = 0;
  for (int step = 0; step < 3000; ++step) {
    if (rng() % 3 != 0) {
      std::array<std::uint64_t, B::ref_lanes> refs;
      for (auto& r : refs) r = next++;
      const vk::Mask m = static_cast<vk::Mask>(rng()) & B::ref_full;
      std::uint64_t* tail = q.ensure_tail(B::ref_lanes);
      const int n = B::compress_store_refs(m, B::load_refs(refs.data()), tail);
      q.commit(static_cast<std::size_t>(n));
      for (int k = 0; k < B::ref_lanes; ++k) {
        if ((m >> k) & 1u) model.push_back(refs[k]);
      }
    } else {
      for (int k = 0; k < 5 && !model.empty(); ++k) {
        ASSERT_EQ(q.peek(0), model.front());
        ASSERT_EQ(q.pop(), model.front());
        model.pop_front();
      }
    }
    ASSERT_EQ(q.size(), model.size());
    if (model.size() > 2) {
      ASSERT_EQ(q.peek(2), model[2]);
    }
  }
}

TEST(RefBuffer, EnsureCommitTruncate) {
  RefBuffer b(16);
  std::uint64_t* p = b.ensure_tail(40);
  for (int k = 0; k < 40; ++k) p[k] = static_cast<std::uint64_t>(k);
  b.commit(25);
  EXPECT_EQ(b.size(), 25u);
  EXPECT_GE(b.capacity(), 40u);
  EXPECT_EQ(b[24], 24u);
  b.truncate(10);
  EXPECT_EQ(b.size(), 10u);
  b.truncate(50);
  EXPECT_EQ(b.size(), 10u);
  b.push_back(99);
  EXPECT_EQ(b.view().back(), 99u);
  b.clear();
  EXPECT_TRUE(b.empty());
}
