#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dispatch.hpp"
#include "simdrt/join.hpp"

namespace simdrt {

std::vector<JoinPair> JoinContext::pairs() const {
  std::vector<JoinPair> r(out_outer.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = {out_outer[i], out_inner[i]};
  return r;
}

void check_join_args(const RTree& outer, const RTree& inner, const JoinOptions& opts, bool scalar) {
  if (outer.layout() != inner.layout()) throw std::invalid_argument("join trees use different layouts");
  if (opts.o4 && opts.o5) throw std::invalid_argument("O4 and O5 are mutually exclusive");
  if (scalar) {
    if (outer.layout() != Layout::d0) throw std::invalid_argument("scalar join needs layout d0");
    if (opts.o4 || opts.o5) throw std::invalid_argument("scalar join supports only O3");
  } else {
    if (outer.layout() == Layout::d0) throw std::invalid_argument("vectorized join needs layout d1 or d2");
    if (opts.o5 && outer.layout() != Layout::d1) throw std::invalid_argument("O5 needs layout d1");
  }
  if ((opts.o3 || opts.o4 || opts.o5) && !(outer.sorted_on_lo_x() && inner.sorted_on_lo_x())) {
    throw std::invalid_argument("O3/O4/O5 need both trees sorted on lo_x");
  }
}

namespace detail {

void descend_unequal(const RTree& outer, NodeRef o, const RTree& inner, NodeRef i,
                     TraversalQueue& oq, TraversalQueue& iq) {
  if (o.level() > i.level()) {
    const Rect mbr = inner.node_mbr(i);
    const std::uint32_t n = outer.header(o).count;
    for (std::uint32_t k = 0; k < n; ++k) {
      const Entry e = outer.entry(o, k);
      if (rect_intersects(e.rect, mbr)) {
        oq.push(e.ref);
        iq.push(i.raw());
      }
    }
  } else {
    const Rect mbr = outer.node_mbr(o);
    const std::uint32_t n = inner.header(i).count;
    for (std::uint32_t k = 0; k < n; ++k) {
      const Entry e = inner.entry(i, k);
      if (rect_intersects(mbr, e.rect)) {
        oq.push(o.raw());
        iq.push(e.ref);
      }
    }
  }
}

}  // namespace detail

namespace {

struct ScalarJoin {
  const RTree& outer;
  const RTree& inner;
  bool o3;
  std::vector<JoinPair>& out;
  JoinStats& stats;

  void visit(NodeRef o, NodeRef i) {
    ++stats.node_pairs;
    if (o.level() > i.level()) {
      const Rect mbr = inner.node_mbr(i);
      const NodeD0View vo = outer.d0(o);
      for (std::uint32_t k = 0; k < vo.count; ++k) {
        const D0Entry& e = vo.entries[k];
        if (rect_intersects({e.lo_x, e.lo_y, e.hi_x, e.hi_y}, mbr)) visit(NodeRef::from_raw(e.ref), i);
      }
      return;
    }
    if (o.level() < i.level()) {
      const Rect mbr = outer.node_mbr(o);
      const NodeD0View vi = inner.d0(i);
      for (std::uint32_t k = 0; k < vi.count; ++k) {
        const D0Entry& e = vi.entries[k];
        if (rect_intersects(mbr, {e.lo_x, e.lo_y, e.hi_x, e.hi_y})) visit(o, NodeRef::from_raw(e.ref));
      }
      return;
    }

    const NodeD0View vo = outer.d0(o);
    const NodeD0View vi = inner.d0(i);
    const bool leaf = o.level() == 0;
    if (leaf) ++stats.leaf_pairs;
    Coord inner_max_hx = -std::numeric_limits<Coord>::infinity();
    if (o3) {
      for (std::uint32_t j = 0; j < vi.count; ++j) inner_max_hx = std::max(inner_max_hx, vi.entries[j].hi_x);
    }
    for (std::uint32_t k = 0; k < vo.count; ++k) {
      const D0Entry& a = vo.entries[k];
      if (o3 && a.lo_x > inner_max_hx) break;
      for (std::uint32_t j = 0; j < vi.count; ++j) {
        const D0Entry& b = vi.entries[j];
        if (a.lo_x > b.hi_x || a.hi_x < b.lo_x || a.lo_y > b.hi_y || a.hi_y < b.lo_y) continue;
        if (leaf) {
          out.push_back({a.ref, b.ref});
        } else {
          visit(NodeRef::from_raw(a.ref), NodeRef::from_raw(b.ref));
        }
      }
    }
  }
};

template <class Fn>
std::vector<JoinPair> run_vec(Fn fn, JoinStats* stats) {
  JoinContext ctx;
  fn(ctx);
  if (stats) *stats = ctx.stats;
  return ctx.pairs();
}

}  // namespace

std::vector<JoinPair> scalar_join(const RTree& outer, const RTree& inner, const JoinOptions& opts,
                                  JoinStats* stats) {
  check_join_args(outer, inner, opts, true);
  std::vector<JoinPair> out;
  JoinStats local;
  ScalarJoin{outer, inner, opts.o3, out, local}.visit(outer.root(), inner.root());
  if (stats) *stats = local;
  return out;
}

namespace {

void one_to_many(const RTree& a, const RTree& b, const JoinOptions& o, Backend be, JoinContext& c) {
  switch (be) {
    case Backend::emulated: dispatch::join_one_to_many_emulated(a, b, o, c); break;
    case Backend::counting: dispatch::join_one_to_many_counting(a, b, o, c); break;
    case Backend::native: dispatch::join_one_to_many_native(a, b, o, c); break;
  }
}

void many_to_many(const RTree& a, const RTree& b, const JoinOptions& o, Backend be, JoinContext& c) {
  switch (be) {
    case Backend::emulated: dispatch::join_many_to_many_emulated(a, b, o, c); break;
    case Backend::counting: dispatch::join_many_to_many_counting(a, b, o, c); break;
    case Backend::native: dispatch::join_many_to_many_native(a, b, o, c); break;
  }
}

}  // namespace

std::vector<JoinPair> vec_join_one_to_many(const RTree& outer, const RTree& inner,
                                           const JoinOptions& opts, Backend backend,
                                           JoinStats* stats) {
  if (opts.o5) throw std::invalid_argument("O5 selects the many-to-many kernel");
  return run_vec([&](JoinContext& c) { one_to_many(outer, inner, opts, backend, c); }, stats);
}

std::vector<JoinPair> vec_join_many_to_many(const RTree& outer, const RTree& inner,
                                            const JoinOptions& opts, Backend backend,
                                            JoinStats* stats) {
  return run_vec([&](JoinContext& c) { many_to_many(outer, inner, opts, backend, c); }, stats);
}

void vec_join(const RTree& outer, const RTree& inner, const JoinOptions& opts, Backend backend,
              JoinContext& ctx) {
  if (opts.o5) {
    many_to_many(outer, inner, opts, backend, ctx);
  } else {
    one_to_many(outer, inner, opts, backend, ctx);
  }
}

}  // namespace simdrt
