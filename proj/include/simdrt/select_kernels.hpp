#pragma once

// Lane-width-generic select kernels. Runtime callers go through select.hpp;
// tests instantiate these directly at other widths.

#include <stdexcept>

#include "simdrt/select.hpp"
#include "simdrt/vkernel.hpp"

namespace simdrt {

template <class B>
struct QueryVectors {
  Layout layout;
  // D1: lo_x, lo_y, hi_x, hi_y broadcasts. D2: a = (lo_x, lo_y) pairs, b = (hi_x, hi_y) pairs.
  typename B::Vec a, b, c, d;
};

template <class B>
QueryVectors<B> build_query_vectors(const Rect& q, Layout layout) {
  QueryVectors<B> qv{};
  qv.layout = layout;
  if (layout == Layout::d1) {
    qv.a = B::broadcast(q.lo_x);
    qv.b = B::broadcast(q.lo_y);
    qv.c = B::broadcast(q.hi_x);
    qv.d = B::broadcast(q.hi_y);
  } else if (layout == Layout::d2) {
    qv.a = B::broadcast_pair(B::expand_load(0b11u, &q.lo_x));
    qv.b = B::broadcast_pair(B::expand_load(0b11u, &q.hi_x));
  } else {
    throw std::invalid_argument("query vectors need layout d1 or d2");
  }
  return qv;
}

/// Evaluates the query against every child of one node and appends the
/// qualifying child references at `out`. Returns how many were written.
/// `out` must have room for tree.capacity() references.
template <class B>
std::size_t evaluate_node(const RTree& tree, NodeRef node, const QueryVectors<B>& qv,
                          std::uint64_t* out) {
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  std::size_t n = 0;
  if (qv.layout == Layout::d1) {
    const NodeD1View v = tree.d1(node);
    const int count = static_cast<int>(v.count);
    for (int base = 0; base < count; base += W) {
      const vk::Mask m =
          (B::template compare<vk::Cmp::ge>(qv.c, B::load(v.lx + base)) &
           B::template compare<vk::Cmp::le>(qv.a, B::load(v.hx + base)) &
           B::template compare<vk::Cmp::ge>(qv.d, B::load(v.ly + base)) &
           B::template compare<vk::Cmp::le>(qv.b, B::load(v.hy + base))) &
          vk::lane_mask(count - base);
      if (m == 0) continue;
      for (int h = 0; h < W; h += Wr) {
        const vk::Mask sub = (m >> h) & B::ref_full;
        if (sub == 0) continue;
        n += static_cast<std::size_t>(B::compress_store_refs(sub, B::load_refs(v.ptr + base + h), out + n));
      }
    }
  } else {
    const NodeD2View v = tree.d2(node);
    const int coords = 2 * static_cast<int>(v.count);
    for (int base = 0; base < coords; base += W) {
      const vk::Mask m = B::template compare<vk::Cmp::ge>(qv.b, B::load(v.lo + base)) &
                         B::template compare<vk::Cmp::le>(qv.a, B::load(v.hi + base));
      const vk::Mask child = vk::compact_pairs(m & vk::lane_mask(coords - base));
      if (child == 0) continue;
      n += static_cast<std::size_t>(B::compress_store_refs(child, B::load_refs(v.ptr + base / 2), out + n));
    }
  }
  return n;
}

namespace detail {

template <class B>
void select_recursive(const RTree& tree, NodeRef node, const QueryVectors<B>& qv, SelectContext& ctx) {
  if (ctx.trace) ctx.trace->record(node);
  if (node.level() == 0) {
    ctx.results.commit(evaluate_node<B>(tree, node, qv, ctx.results.ensure_tail(tree.capacity())));
    return;
  }
  const std::size_t begin = ctx.stack.size();
  ctx.stack.commit(evaluate_node<B>(tree, node, qv, ctx.stack.ensure_tail(tree.capacity())));
  const std::size_t end = ctx.stack.size();
  for (std::size_t i = begin; i < end; ++i) {
    select_recursive<B>(tree, NodeRef::from_raw(ctx.stack[i]), qv, ctx);
  }
  ctx.stack.truncate(begin);
}

}  // namespace detail

/// Runs one select with backend B; results land in ctx.results.
template <class B>
void vec_select_into(const RTree& tree, const Rect& q, const SelectOptions& opts, SelectContext& ctx) {
  if (tree.layout() == Layout::d0) throw std::invalid_argument("vectorized select needs layout d1 or d2");
  opts.check();
  ctx.results.clear();
  ctx.stack.clear();
  const QueryVectors<B> qv = build_query_vectors<B>(q, tree.layout());

  if (!opts.use_queue) {
    detail::select_recursive<B>(tree, tree.root(), qv, ctx);
    return;
  }

  TraversalQueue& queue = ctx.queue;
  queue.clear();
  queue.push(tree.root().raw());
  const std::size_t cap = tree.capacity();
  const std::size_t stride = tree.node_stride();
  while (!queue.empty()) {
    const NodeRef node = NodeRef::from_raw(queue.pop());
    if (opts.use_prefetch) {
      if (opts.pf_distance == 0) {
        B::prefetch(tree.node_data(node), stride, opts.prefetch_level);
      } else if (queue.size() >= opts.pf_distance) {
        B::prefetch(tree.node_data(NodeRef::from_raw(queue.peek(opts.pf_distance - 1))), stride,
                    opts.prefetch_level);
      }
    }
    if (ctx.trace) ctx.trace->record(node);
    if (node.level() == 0) {
      ctx.results.commit(evaluate_node<B>(tree, node, qv, ctx.results.ensure_tail(cap)));
    } else {
      queue.commit(evaluate_node<B>(tree, node, qv, queue.ensure_tail(cap)));
    }
  }
}

}  // namespace simdrt
