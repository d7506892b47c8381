#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "simdrt/backend.hpp"
#include "simdrt/geom.hpp"
#include "simdrt/queue.hpp"
#include "simdrt/rtree.hpp"

namespace simdrt {

struct SelectOptions {
  bool use_queue = false;     // O1: breadth-first traversal through a TraversalQueue
  bool use_prefetch = false;  // O2: prefetch the node pf_distance entries ahead; needs use_queue
  std::uint32_t pf_distance = 8;
  vk::CacheLevel prefetch_level = vk::CacheLevel::l1;

  /// Throws std::invalid_argument when use_prefetch is set without use_queue.
  void check() const;
};

/// Nodes in the order the traversal evaluated them.
struct SelectTrace {
  std::vector<NodeRef> visited;

  void record(NodeRef r);
};

/// Reusable per-query working storage. One context per thread.
struct SelectContext {
  TraversalQueue queue;
  RefBuffer results;
  RefBuffer stack;  // child lists of the recursive variant
  SelectTrace* trace = nullptr;
};

/// Depth-first select over a D0 tree; the four comparisons short-circuit.
std::vector<ObjectId> scalar_select_logical(const RTree& tree, const Rect& q,
                                            SelectTrace* trace = nullptr);
void scalar_select_logical(const RTree& tree, const Rect& q, std::vector<ObjectId>& out,
                           SelectTrace* trace = nullptr);

/// Same traversal, one branch per entry over all four comparisons.
std::vector<ObjectId> scalar_select_bitwise(const RTree& tree, const Rect& q,
                                            SelectTrace* trace = nullptr);
void scalar_select_bitwise(const RTree& tree, const Rect& q, std::vector<ObjectId>& out,
                           SelectTrace* trace = nullptr);

/// Vectorized select over a D1 or D2 tree at the reference lane width.
std::vector<ObjectId> vec_select(const RTree& tree, const Rect& q, const SelectOptions& opts,
                                 Backend backend = Backend::emulated, SelectTrace* trace = nullptr);

/// Allocation-free form: the result lives in ctx.results until the next call.
std::span<const ObjectId> vec_select(const RTree& tree, const Rect& q, const SelectOptions& opts,
                                     Backend backend, SelectContext& ctx);

}  // namespace simdrt
