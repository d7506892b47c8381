#pragma once

// Lane-width-generic join kernels. Runtime callers go through join.hpp;
// tests instantiate these directly at other widths.

#include <array>
#include <bit>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "simdrt/join.hpp"
#include "simdrt/vkernel.hpp"

namespace simdrt {

/// Per-lane binary-search constants for one inner fanout. Built once per join.
/// Probes start at F/2; update it moves set lanes by up[it] and clear lanes by
/// down[it]. The last update only steps clear lanes left by one.
template <class B>
struct FlipSchedule {
  struct Step {
    typename B::IVec up, down;
  };

  std::uint32_t fanout = 0;
  int iterations = 0;  // log2(F) + 1 gathers
  typename B::IVec seed_probe{};
  typename B::IVec seed_flip{};
  std::vector<Step> steps;  // iterations - 1 entries

  static FlipSchedule make(std::uint32_t fanout) {
    if (fanout < 2 || !std::has_single_bit(fanout)) {
      throw std::invalid_argument("flip search needs a power-of-two fanout");
    }
    FlipSchedule s;
    s.fanout = fanout;
    const int log_f = std::countr_zero(fanout);
    s.iterations = log_f + 1;
    s.seed_probe = B::ibroadcast(static_cast<std::int32_t>(fanout / 2));
    s.seed_flip = B::ibroadcast(static_cast<std::int32_t>(fanout));
    for (int it = 0; it < log_f; ++it) {
      std::int32_t up, down;
      if (it == log_f - 1) {
        up = 0;
        down = -1;
      } else {
        const std::int32_t step = static_cast<std::int32_t>(fanout >> (it + 2));
        up = step;
        down = -step;
      }
      s.steps.push_back({B::ibroadcast(up), B::ibroadcast(down)});
    }
    return s;
  }
};

struct FlipStep {
  std::vector<std::int32_t> probes;       // indices gathered this iteration
  vk::Mask mask = 0;                      // outer.hi_x >= inner.lo_x[probe]
  std::vector<std::int32_t> flips;        // after the blend
  std::vector<std::int32_t> next_probes;  // after the masked additions
};

/// Binary search of each lane's outer hi_x in an ascending inner lo_x array
/// padded with +inf up to the fanout. Lane i ends holding the number of inner
/// entries whose lo_x <= hi_x[i]; 0 means no inner entry qualifies.
template <class B>
typename B::IVec flip_kernel(const typename B::Vec& outer_hx, const float* inner_lo_x,
                             const FlipSchedule<B>& s, std::vector<FlipStep>* trace = nullptr) {
  typename B::IVec probes = s.seed_probe;
  typename B::IVec flip = s.seed_flip;
  for (int it = 0; it < s.iterations; ++it) {
    const typename B::Vec v = B::gather(probes, inner_lo_x);
    const vk::Mask m = B::template compare<vk::Cmp::ge>(outer_hx, v, vk::Tag::xlow);
    flip = B::iblend(m, probes, flip);
    FlipStep* step = nullptr;
    if (trace) {
      step = &trace->emplace_back();
      const auto p = B::ito_array(probes);
      const auto f = B::ito_array(flip);
      step->probes.assign(p.begin(), p.end());
      step->mask = m;
      step->flips.assign(f.begin(), f.end());
    }
    if (it + 1 < s.iterations) {
      probes = B::imasked_add(m, probes, s.steps[it].up);
      probes = B::imasked_add(~m & B::full, probes, s.steps[it].down);
    }
    if (step) {
      const auto p = B::ito_array(probes);
      step->next_probes.assign(p.begin(), p.end());
    }
  }
  return flip;
}

template <class B>
struct FlipResult {
  std::array<std::int32_t, B::lanes> values{};  // 0 on undefined lanes
  vk::Mask valid = 0;                           // lanes with at least one qualifying inner entry
  std::vector<FlipStep> trace;
};

/// Checked entry point: inner_lo_x must be ascending with at most `fanout` entries.
template <class B>
FlipResult<B> flip_search(const typename B::Vec& outer_hx, std::span<const float> inner_lo_x,
                          std::uint32_t fanout) {
  if (inner_lo_x.size() > fanout) throw std::invalid_argument("flip search: more inner entries than fanout");
  for (std::size_t j = 1; j < inner_lo_x.size(); ++j) {
    if (inner_lo_x[j] < inner_lo_x[j - 1]) throw std::invalid_argument("flip search: inner lo_x not ascending");
  }
  const FlipSchedule<B> s = FlipSchedule<B>::make(fanout);
  std::vector<float> padded(fanout, std::numeric_limits<float>::infinity());
  std::copy(inner_lo_x.begin(), inner_lo_x.end(), padded.begin());

  FlipResult<B> r;
  r.values = B::ito_array(flip_kernel<B>(outer_hx, padded.data(), s, &r.trace));
  for (int i = 0; i < B::lanes; ++i) {
    if (r.values[i] > 0) r.valid |= vk::Mask{1} << i;
  }
  return r;
}

namespace detail {

template <class B>
struct InnerGroup {
  typename B::Vec lx, ly, hx, hy;  // D2: lx = lo pairs, hx = hi pairs
};

template <class B>
struct RefBox {
  typename B::RVec v;
};

template <class B>
struct JoinWork {
  std::vector<InnerGroup<B>> groups;
  std::vector<RefBox<B>> refs;
  FlipSchedule<B> schedule;
  alignas(64) std::int32_t flips[B::lanes];

  explicit JoinWork(const RTree& inner)
      : groups(2 * inner.capacity() / B::lanes + 1), refs(inner.capacity() / B::ref_lanes + 1) {}
};

constexpr int ceil_div(int a, int b) { return (a + b - 1) / b; }

/// Writes the outer reference `n_hat` times by storing its lane-duplicated
/// register ceil(n_hat / Wr) times.
template <class B>
void store_outer_dups(const typename B::RVec& block, int lane, int n_hat, std::uint64_t* dst) {
  const typename B::RVec dup = B::dup_ref(block, lane);
  for (int s = 0; s < n_hat; s += B::ref_lanes) B::store_refs(dup, dst + s);
}

template <class B>
int emit_refs_d1(vk::Mask m, int group, const JoinWork<B>& w, std::uint64_t* dst) {
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  int n = 0;
  for (int h = 0; h < W; h += Wr) {
    const vk::Mask sub = (m >> h) & B::ref_full;
    if (sub == 0) continue;
    n += B::compress_store_refs(sub, w.refs[(group * W + h) / Wr].v, dst + n);
  }
  return n;
}

template <class B>
int load_inner_d1(const RTree& inner, NodeRef i, JoinWork<B>& w) {
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  const NodeD1View vi = inner.d1(i);
  const int n_in = static_cast<int>(vi.count);
  const int groups = ceil_div(n_in, W);
  for (int g = 0; g < groups; ++g) {
    w.groups[g] = {B::load(vi.lx + g * W), B::load(vi.ly + g * W), B::load(vi.hx + g * W),
                   B::load(vi.hy + g * W)};
  }
  for (int r = 0; r < ceil_div(n_in, Wr); ++r) w.refs[r].v = B::load_refs(vi.ptr + r * Wr);
  return n_in;
}

template <class B, class Sink>
void pair_one_to_many_d1(const RTree& outer, NodeRef o, const RTree& inner, NodeRef i,
                         const JoinOptions& opts, JoinWork<B>& w, Sink& so, Sink& si) {
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  using vk::Cmp;
  const NodeD1View vo = outer.d1(o);
  const int n_out = static_cast<int>(vo.count);
  const int n_in = load_inner_d1<B>(inner, i, w);
  const int groups = ceil_div(n_in, W);

  typename B::RVec oblock{};
  int oblock_id = -1;
  for (int k = 0; k < n_out; ++k) {
    const auto olx = B::broadcast(vo.lx[k]);
    const auto ohx = B::broadcast(vo.hx[k]);
    const auto oly = B::broadcast(vo.ly[k]);
    const auto ohy = B::broadcast(vo.hy[k]);
    std::uint64_t* odst = so.ensure_tail(static_cast<std::size_t>(n_in + Wr));
    std::uint64_t* idst = si.ensure_tail(static_cast<std::size_t>(n_in + Wr));

    int n_hat = 0;
    vk::Mask any_m1 = 0;
    bool complete = true;
    for (int g = 0; g < groups; ++g) {
      const InnerGroup<B>& in = w.groups[g];
      const vk::Mask valid = vk::lane_mask(n_in - g * W) & B::full;
      const vk::Mask m1 = B::template compare<Cmp::le>(olx, in.hx);
      const vk::Mask m2 = B::template compare<Cmp::ge>(ohx, in.lx, vk::Tag::xlow);
      const vk::Mask m3 = B::template compare<Cmp::le>(oly, in.hy);
      const vk::Mask m4 = B::template compare<Cmp::ge>(ohy, in.ly);
      any_m1 |= m1 & valid;
      const vk::Mask m = m1 & m2 & m3 & m4 & valid;
      if (m) n_hat += emit_refs_d1<B>(m, g, w, idst + n_hat);
      if (opts.o4 && (m2 & valid) != valid) {
        complete = g + 1 == groups;
        break;
      }
    }
    if (n_hat > 0) {
      if (k / Wr != oblock_id) {
        oblock_id = k / Wr;
        oblock = B::load_refs(vo.ptr + oblock_id * Wr);
      }
      store_outer_dups<B>(oblock, k % Wr, n_hat, odst);
      so.commit(static_cast<std::size_t>(n_hat));
      si.commit(static_cast<std::size_t>(n_hat));
    }
    if (opts.o3 && complete && any_m1 == 0) break;
  }
}

template <class B, class Sink>
void pair_one_to_many_d2(const RTree& outer, NodeRef o, const RTree& inner, NodeRef i,
                         const JoinOptions& opts, JoinWork<B>& w, Sink& so, Sink& si) {
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  using vk::Cmp;
  const NodeD2View vo = outer.d2(o);
  const NodeD2View vi = inner.d2(i);
  const int n_out = static_cast<int>(vo.count);
  const int n_in = static_cast<int>(vi.count);
  const int coords = 2 * n_in;
  const int groups = ceil_div(coords, W);
  for (int g = 0; g < groups; ++g) {
    w.groups[g].lx = B::load(vi.lo + g * W);
    w.groups[g].hx = B::load(vi.hi + g * W);
    w.refs[g].v = B::load_refs(vi.ptr + g * Wr);
  }

  typename B::RVec oblock{};
  int oblock_id = -1;
  for (int k = 0; k < n_out; ++k) {
    const auto olo = B::broadcast_pair(B::expand_load(0b11u, vo.lo + 2 * k));
    const auto ohi = B::broadcast_pair(B::expand_load(0b11u, vo.hi + 2 * k));
    std::uint64_t* odst = so.ensure_tail(static_cast<std::size_t>(n_in + Wr));
    std::uint64_t* idst = si.ensure_tail(static_cast<std::size_t>(n_in + Wr));

    int n_hat = 0;
    vk::Mask any_x1 = 0;
    bool complete = true;
    for (int g = 0; g < groups; ++g) {
      const vk::Mask valid = vk::lane_mask(coords - g * W) & B::full;
      const vk::Mask ev = valid & vk::even_lanes(W);
      // lane (x): olo_x <= hi_x, lane (y): olo_y <= hi_y
      const vk::Mask s1 = B::template compare<Cmp::le>(olo, w.groups[g].hx);
      const vk::Mask s2 = B::template compare<Cmp::ge>(ohi, w.groups[g].lx, vk::Tag::xlow);
      any_x1 |= s1 & ev;
      const vk::Mask child = vk::compact_pairs(s1 & s2 & valid);
      if (child) n_hat += B::compress_store_refs(child, w.refs[g].v, idst + n_hat);
      if (opts.o4 && (s2 & ev) != ev) {
        complete = g + 1 == groups;
        break;
      }
    }
    if (n_hat > 0) {
      if (k / Wr != oblock_id) {
        oblock_id = k / Wr;
        oblock = B::load_refs(vo.ptr + oblock_id * Wr);
      }
      store_outer_dups<B>(oblock, k % Wr, n_hat, odst);
      so.commit(static_cast<std::size_t>(n_hat));
      si.commit(static_cast<std::size_t>(n_hat));
    }
    if (opts.o3 && complete && any_x1 == 0) break;
  }
}

template <class B, class Sink>
void pair_many_to_many(const RTree& outer, NodeRef o, const RTree& inner, NodeRef i,
                       const JoinOptions& opts, JoinWork<B>& w, Sink& so, Sink& si) {
  constexpr int W = B::lanes;
  constexpr int Wr = B::ref_lanes;
  using vk::Cmp;
  const NodeD1View vo = outer.d1(o);
  const NodeD1View vi = inner.d1(i);
  const int n_out = static_cast<int>(vo.count);
  const int n_in = load_inner_d1<B>(inner, i, w);

  typename B::RVec oblock{};
  int oblock_id = -1;
  for (int base = 0; base < n_out; base += W) {
    const auto ohx_v = B::load(vo.hx + base);
    B::istore(flip_kernel<B>(ohx_v, vi.lx, w.schedule), w.flips);
    const int lanes_here = n_out - base < W ? n_out - base : W;
    for (int j = 0; j < lanes_here; ++j) {
      const int flip = w.flips[j];
      if (flip == 0) continue;
      const int k = base + j;
      const auto olx = B::broadcast(vo.lx[k]);
      const auto oly = B::broadcast(vo.ly[k]);
      const auto ohy = B::broadcast(vo.hy[k]);
      std::uint64_t* odst = so.ensure_tail(static_cast<std::size_t>(n_in + Wr));
      std::uint64_t* idst = si.ensure_tail(static_cast<std::size_t>(n_in + Wr));

      int n_hat = 0;
      vk::Mask any_m1 = 0;
      const int groups = ceil_div(flip, W);
      for (int g = 0; g < groups; ++g) {
        const InnerGroup<B>& in = w.groups[g];
        const vk::Mask prefix = vk::lane_mask(flip - g * W) & B::full;
        const vk::Mask m1 = B::template compare<Cmp::le>(olx, in.hx);
        const vk::Mask m3 = B::template compare<Cmp::le>(oly, in.hy);
        const vk::Mask m4 = B::template compare<Cmp::ge>(ohy, in.ly);
        any_m1 |= m1 & prefix;
        const vk::Mask m = m1 & m3 & m4 & prefix;
        if (m) n_hat += emit_refs_d1<B>(m, g, w, idst + n_hat);
      }
      if (n_hat > 0) {
        if (k / Wr != oblock_id) {
          oblock_id = k / Wr;
          oblock = B::load_refs(vo.ptr + oblock_id * Wr);
        }
        store_outer_dups<B>(oblock, k % Wr, n_hat, odst);
        so.commit(static_cast<std::size_t>(n_hat));
        si.commit(static_cast<std::size_t>(n_hat));
      }
      // Entries past a short flip have lo_x > hi_x >= lo_x of this outer
      // child, so only a full-width flip can show an all-zero first stage.
      if (opts.o3 && flip == n_in && any_m1 == 0) return;
    }
  }
}

/// Node pairs whose sides sit at different levels: descend the deeper side
/// against the shallower node's MBR.
void descend_unequal(const RTree& outer, NodeRef o, const RTree& inner, NodeRef i,
                     TraversalQueue& oq, TraversalQueue& iq);

template <class PairFn>
void join_traverse(const RTree& outer, const RTree& inner, JoinContext& ctx, PairFn&& pair_fn) {
  TraversalQueue& oq = ctx.outer_q;
  TraversalQueue& iq = ctx.inner_q;
  oq.clear();
  iq.clear();
  ctx.out_outer.clear();
  ctx.out_inner.clear();
  ctx.stats = {};
  oq.push(outer.root().raw());
  iq.push(inner.root().raw());
  while (!oq.empty()) {
    if (oq.size() != iq.size()) throw std::logic_error("join queues out of lockstep");
    const NodeRef o = NodeRef::from_raw(oq.pop());
    const NodeRef i = NodeRef::from_raw(iq.pop());
    ++ctx.stats.node_pairs;
    if (o.level() != i.level()) {
      descend_unequal(outer, o, inner, i, oq, iq);
    } else if (o.level() == 0) {
      ++ctx.stats.leaf_pairs;
      pair_fn(o, i, ctx.out_outer, ctx.out_inner);
    } else {
      pair_fn(o, i, oq, iq);
    }
  }
}

}  // namespace detail

template <class B>
void vec_join_one_to_many_into(const RTree& outer, const RTree& inner, const JoinOptions& opts,
                               JoinContext& ctx) {
  JoinOptions o = opts;
  o.o5 = false;
  check_join_args(outer, inner, o, false);
  detail::JoinWork<B> w(inner);
  if (outer.layout() == Layout::d1) {
    detail::join_traverse(outer, inner, ctx, [&](NodeRef a, NodeRef b, auto& so, auto& si) {
      detail::pair_one_to_many_d1<B>(outer, a, inner, b, o, w, so, si);
    });
  } else {
    detail::join_traverse(outer, inner, ctx, [&](NodeRef a, NodeRef b, auto& so, auto& si) {
      detail::pair_one_to_many_d2<B>(outer, a, inner, b, o, w, so, si);
    });
  }
}

template <class B>
void vec_join_many_to_many_into(const RTree& outer, const RTree& inner, const JoinOptions& opts,
                                JoinContext& ctx) {
  if (opts.o4) throw std::invalid_argument("O4 cannot be combined with the many-to-many kernel");
  JoinOptions o = opts;
  o.o5 = true;
  check_join_args(outer, inner, o, false);
  detail::JoinWork<B> w(inner);
  w.schedule = FlipSchedule<B>::make(inner.fanout());
  detail::join_traverse(outer, inner, ctx, [&](NodeRef a, NodeRef b, auto& so, auto& si) {
    detail::pair_many_to_many<B>(outer, a, inner, b, o, w, so, si);
  });
}

}  // namespace simdrt
