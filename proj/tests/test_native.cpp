#include <gtest/gtest.h>

#include <random>

#include "native_checks.hpp"
#include "simdrt/join.hpp"
#include "simdrt/select.hpp"
#include "test_support.hpp"

using namespace simdrt;
using simdrt::testing::random_points;
using simdrt::testing::random_window;
using simdrt::testing::sorted;
using simdrt::testing::to_pairs;

#define SKIP_WITHOUT_NATIVE() \
  if (!native_available()) GTEST_SKIP() << "native backend unavailable on this build or CPU"

TEST(Native, UnavailableIsAnError) {
  if (native_available()) {
    EXPECT_NO_THROW(require_native());
  } else {
    EXPECT_THROW(require_native(), std::runtime_error);
  }
}

TEST(Native, FigureSuite) {
  SKIP_WITHOUT_NATIVE();
  for (const std::string& f : simdrt::testing::native_figure_suite()) ADD_FAILURE() << f;
}

TEST(Native, LaneEquivalenceWithEmulation) {
  SKIP_WITHOUT_NATIVE();
  for (const std::string& f : simdrt::testing::native_lane_equivalence(1234, 500)) ADD_FAILURE() << f;
}

TEST(Native, SelectMatchesEmulated) {
  SKIP_WITHOUT_NATIVE();
  const auto data = random_points(20000, 1);
  std::mt19937_64 rng(2);
  for (Layout l : {Layout::d1, Layout::d2}) {
    const RTree t = build_str(data, 64, l);
    for (int k = 0; k < 50; ++k) {
      const Rect q = random_window(rng, 0.05f);
      SelectOptions o;
      o.use_queue = k % 2 == 0;
      o.use_prefetch = k % 4 == 0;
      EXPECT_EQ(sorted(vec_select(t, q, o, Backend::native)), oracle_select(data, q));
    }
  }
}

TEST(Native, JoinMatchesOracle) {
  SKIP_WITHOUT_NATIVE();
  auto outer = random_points(3000, 3), inner = random_points(3000, 4);
  for (auto* v : {&outer, &inner}) {
    for (Rect& r : *v) r = {r.lo_x - 0.01f, r.lo_y - 0.01f, r.hi_x + 0.01f, r.hi_y + 0.01f};
  }
  const auto want = sorted(to_pairs(oracle_join(outer, inner)));
  const RTree a = sort_nodes_by_lo_x(build_str(outer, 16, Layout::d1));
  const RTree b = sort_nodes_by_lo_x(build_str(inner, 16, Layout::d1));
  EXPECT_EQ(sorted(vec_join_one_to_many(a, b, {true, true, false}, Backend::native)), want);
  EXPECT_EQ(sorted(vec_join_many_to_many(a, b, {true, false, true}, Backend::native)), want);
  const RTree c = convert_layout(a, Layout::d2), d = convert_layout(b, Layout::d2);
  EXPECT_EQ(sorted(vec_join_one_to_many(c, d, {false, true, false}, Backend::native)), want);
}
