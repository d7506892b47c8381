#include <stdexcept>

#include "dispatch.hpp"
#include "simdrt/select.hpp"

namespace simdrt {

void SelectTrace::record(NodeRef r) { visited.push_back(r); }

void SelectOptions::check() const {
  if (use_prefetch && !use_queue) {
    throw std::invalid_argument("prefetching (O2) requires the traversal queue (O1)");
  }
}

namespace {

template <bool Bitwise>
void scalar_visit(const RTree& tree, NodeRef node, const Rect& q, std::vector<ObjectId>& out,
                  SelectTrace* trace) {
  if (trace) trace->record(node);
  const NodeD0View v = tree.d0(node);
  const bool leaf = node.level() == 0;
  for (std::uint32_t i = 0; i < v.count; ++i) {
    const D0Entry& e = v.entries[i];
    bool hit;
    if constexpr (Bitwise) {
      hit = static_cast<bool>(static_cast<unsigned>(q.hi_x >= e.lo_x) & static_cast<unsigned>(q.lo_x <= e.hi_x) &
                              static_cast<unsigned>(q.hi_y >= e.lo_y) & static_cast<unsigned>(q.lo_y <= e.hi_y));
    } else {
      hit = q.hi_x >= e.lo_x && q.lo_x <= e.hi_x && q.hi_y >= e.lo_y && q.lo_y <= e.hi_y;
    }
    if (!hit) continue;
    if (leaf) {
      out.push_back(e.ref);
    } else {
      scalar_visit<Bitwise>(tree, NodeRef::from_raw(e.ref), q, out, trace);
    }
  }
}

void require_d0(const RTree& tree) {
  if (tree.layout() != Layout::d0) throw std::invalid_argument("scalar select needs layout d0");
}

}  // namespace

void scalar_select_logical(const RTree& tree, const Rect& q, std::vector<ObjectId>& out,
                           SelectTrace* trace) {
  require_d0(tree);
  out.clear();
  scalar_visit<false>(tree, tree.root(), q, out, trace);
}

std::vector<ObjectId> scalar_select_logical(const RTree& tree, const Rect& q, SelectTrace* trace) {
  std::vector<ObjectId> out;
  scalar_select_logical(tree, q, out, trace);
  return out;
}

void scalar_select_bitwise(const RTree& tree, const Rect& q, std::vector<ObjectId>& out,
                           SelectTrace* trace) {
  require_d0(tree);
  out.clear();
  scalar_visit<true>(tree, tree.root(), q, out, trace);
}

std::vector<ObjectId> scalar_select_bitwise(const RTree& tree, const Rect& q, SelectTrace* trace) {
  std::vector<ObjectId> out;
  scalar_select_bitwise(tree, q, out, trace);
  return out;
}

std::span<const ObjectId> vec_select(const RTree& tree, const Rect& q, const SelectOptions& opts,
                                     Backend backend, SelectContext& ctx) {
  switch (backend) {
    case Backend::emulated: dispatch::select_emulated(tree, q, opts, ctx); break;
    case Backend::counting: dispatch::select_counting(tree, q, opts, ctx); break;
    case Backend::native: dispatch::select_native(tree, q, opts, ctx); break;
  }
  return ctx.results.view();
}

std::vector<ObjectId> vec_select(const RTree& tree, const Rect& q, const SelectOptions& opts,
                                 Backend backend, SelectTrace* trace) {
  SelectContext ctx;
  ctx.trace = trace;
  const auto r = vec_select(tree, q, opts, backend, ctx);
  return {r.begin(), r.end()};
}

}  // namespace simdrt
