#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "simdrt/backend.hpp"
#include "simdrt/geom.hpp"
#include "simdrt/queue.hpp"
#include "simdrt/rtree.hpp"

namespace simdrt {

struct JoinPair {
  ObjectId outer_id = 0;
  ObjectId inner_id = 0;

  friend auto operator<=>(const JoinPair&, const JoinPair&) = default;
};

/// O3 prunes trailing outer children, O4 trailing inner lane groups, O5
/// selects the many-to-many kernel. All three need both trees sorted on lo_x;
/// O4 and O5 cannot be combined.
struct JoinOptions {
  bool o3 = false;
  bool o4 = false;
  bool o5 = false;
};

struct JoinStats {
  std::uint64_t node_pairs = 0;  // node pairs dequeued, root pair included
  std::uint64_t leaf_pairs = 0;  // leaf-level node pairs among them
};

/// Reusable working storage for one join at a time.
struct JoinContext {
  TraversalQueue outer_q;
  TraversalQueue inner_q;
  RefBuffer out_outer;  // emitted pairs, lockstep with out_inner
  RefBuffer out_inner;
  JoinStats stats;

  std::vector<JoinPair> pairs() const;
};

/// Synchronized depth-first join of two D0 trees. Only o3 is accepted.
std::vector<JoinPair> scalar_join(const RTree& outer, const RTree& inner, const JoinOptions& opts,
                                  JoinStats* stats = nullptr);

/// One outer MBR broadcast against vectors of inner MBRs; D1 or D2.
std::vector<JoinPair> vec_join_one_to_many(const RTree& outer, const RTree& inner,
                                           const JoinOptions& opts,
                                           Backend backend = Backend::emulated,
                                           JoinStats* stats = nullptr);

/// Vectors of outer MBRs against binary-searched inner prefixes; D1 only.
/// o5 is implied; o3 is honoured; o4 is rejected.
std::vector<JoinPair> vec_join_many_to_many(const RTree& outer, const RTree& inner,
                                            const JoinOptions& opts,
                                            Backend backend = Backend::emulated,
                                            JoinStats* stats = nullptr);

/// Picks many-to-many when opts.o5 is set, one-to-many otherwise. Pairs stay
/// in ctx.out_outer / ctx.out_inner.
void vec_join(const RTree& outer, const RTree& inner, const JoinOptions& opts, Backend backend,
              JoinContext& ctx);

/// Throws std::invalid_argument for illegal layout or option combinations.
void check_join_args(const RTree& outer, const RTree& inner, const JoinOptions& opts, bool scalar);

}  // namespace simdrt
