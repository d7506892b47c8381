#include "simdrt/rtree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <numeric>
#include <stdexcept>

namespace simdrt {

Layout parse_layout(std::string_view name) {
  if (name == "d0" || name == "D0") return Layout::d0;
  if (name == "d1" || name == "D1") return Layout::d1;
  if (name == "d2" || name == "D2") return Layout::d2;
  throw std::invalid_argument("unknown layout '" + std::string(name) + "' (expected d0, d1 or d2)");
}

std::string_view to_string(Layout l) {
  switch (l) {
    case Layout::d0: return "d0";
    case Layout::d1: return "d1";
    case Layout::d2: return "d2";
  }
  return "?";
}

namespace detail {

AlignedBuffer::AlignedBuffer(std::size_t bytes)
    : data_(static_cast<std::byte*>(::operator new(bytes == 0 ? kAlign : bytes,
                                                   std::align_val_t{kAlign}))),
      size_(bytes) {
  std::memset(data_.get(), 0, size_);
}

AlignedBuffer::AlignedBuffer(const AlignedBuffer& other) : AlignedBuffer(other.size_) {
  if (size_ != 0) std::memcpy(data_.get(), other.data_.get(), size_);
}

AlignedBuffer& AlignedBuffer::operator=(const AlignedBuffer& other) {
  if (this != &other) *this = AlignedBuffer(other);
  return *this;
}

void AlignedBuffer::Free::operator()(std::byte* p) const {
  ::operator delete(p, std::align_val_t{kAlign});
}

}  // namespace detail

namespace {

void write_slot(std::byte* node, Layout layout, std::uint32_t cap, std::uint32_t i, const Entry& e) {
  std::byte* body = node + RTree::kHeaderBytes;
  switch (layout) {
    case Layout::d0: {
      auto* entries = reinterpret_cast<D0Entry*>(body);
      entries[i] = {e.rect.lo_x, e.rect.lo_y, e.rect.hi_x, e.rect.hi_y, e.ref};
      break;
    }
    case Layout::d1: {
      auto* c = reinterpret_cast<Coord*>(body);
      c[i] = e.rect.lo_x;
      c[cap + i] = e.rect.lo_y;
      c[2 * cap + i] = e.rect.hi_x;
      c[3 * cap + i] = e.rect.hi_y;
      reinterpret_cast<std::uint64_t*>(c + 4 * cap)[i] = e.ref;
      break;
    }
    case Layout::d2: {
      auto* c = reinterpret_cast<Coord*>(body);
      c[2 * i] = e.rect.lo_x;
      c[2 * i + 1] = e.rect.lo_y;
      c[2 * cap + 2 * i] = e.rect.hi_x;
      c[2 * cap + 2 * i + 1] = e.rect.hi_y;
      reinterpret_cast<std::uint64_t*>(c + 4 * cap)[i] = e.ref;
      break;
    }
  }
}

Entry read_slot(const std::byte* node, Layout layout, std::uint32_t cap, std::uint32_t i) {
  const std::byte* body = node + RTree::kHeaderBytes;
  switch (layout) {
    case Layout::d0: {
      const auto& d = reinterpret_cast<const D0Entry*>(body)[i];
      return {{d.lo_x, d.lo_y, d.hi_x, d.hi_y}, d.ref};
    }
    case Layout::d1: {
      const auto* c = reinterpret_cast<const Coord*>(body);
      return {{c[i], c[cap + i], c[2 * cap + i], c[3 * cap + i]},
              reinterpret_cast<const std::uint64_t*>(c + 4 * cap)[i]};
    }
    case Layout::d2: {
      const auto* c = reinterpret_cast<const Coord*>(body);
      return {{c[2 * i], c[2 * i + 1], c[2 * cap + 2 * i], c[2 * cap + 2 * i + 1]},
              reinterpret_cast<const std::uint64_t*>(c + 4 * cap)[i]};
    }
  }
  return {};
}

Rect entries_mbr(const std::vector<Entry>& entries) {
  Rect r = entries.front().rect;
  for (const Entry& e : entries) r = rect_union(r, e.rect);
  return r;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t ceil_sqrt(std::uint64_t p) {
  auto s = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(p))));
  while (s * s < p) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= p) --s;
  return s;
}

// One STR pass: x-center slabs of S*F items, each sorted by y-center and cut into runs of F.
std::vector<LogicalNode> str_pack(const std::vector<Entry>& items, std::uint32_t fanout,
                                  std::uint32_t level) {
  struct Key {
    Coord cx, cy;
    std::uint32_t idx;
  };
  const std::uint64_t n = items.size();
  std::vector<Key> keys(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Rect& r = items[i].rect;
    keys[i] = {(r.lo_x + r.hi_x) * Coord{0.5}, (r.lo_y + r.hi_y) * Coord{0.5},
               static_cast<std::uint32_t>(i)};
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) { return a.cx < b.cx; });

  const std::uint64_t leaves = ceil_div(n, fanout);
  const std::uint64_t slab = ceil_sqrt(leaves) * fanout;

  std::vector<LogicalNode> nodes;
  nodes.reserve(leaves);
  for (std::uint64_t s0 = 0; s0 < n; s0 += slab) {
    const std::uint64_t s1 = std::min(n, s0 + slab);
    std::stable_sort(keys.begin() + static_cast<std::ptrdiff_t>(s0),
                     keys.begin() + static_cast<std::ptrdiff_t>(s1),
                     [](const Key& a, const Key& b) { return a.cy < b.cy; });
    for (std::uint64_t r0 = s0; r0 < s1; r0 += fanout) {
      const std::uint64_t r1 = std::min(s1, r0 + fanout);
      LogicalNode node;
      node.level = level;
      node.entries.reserve(r1 - r0);
      for (std::uint64_t k = r0; k < r1; ++k) node.entries.push_back(items[keys[k].idx]);
      nodes.push_back(std::move(node));
    }
  }
  return nodes;
}

}  // namespace

std::uint64_t RTree::node_count() const {
  std::uint64_t n = 0;
  for (const Slab& s : levels_) n += s.nodes;
  return n;
}

std::span<const std::byte> RTree::level_bytes(std::uint32_t level) const {
  const Slab& s = levels_.at(level);
  return {s.bytes.data(), s.bytes.size()};
}

Entry RTree::entry(NodeRef r, std::uint32_t i) const {
  if (i >= capacity_) throw std::out_of_range("RTree::entry: slot beyond node capacity");
  return read_slot(node_data(r), layout_, capacity_, i);
}

Rect RTree::node_mbr(NodeRef r) const {
  const std::uint32_t n = header(r).count;
  Rect m = Rect::sentinel();
  for (std::uint32_t i = 0; i < n; ++i) m = rect_union(m, entry(r, i).rect);
  return m;
}

void RTree::overwrite_entry(NodeRef r, std::uint32_t i, const Entry& e) {
  if (i >= capacity_) throw std::out_of_range("RTree::overwrite_entry: slot beyond node capacity");
  write_slot(mutable_node(r), layout_, capacity_, i, e);
}

void check_fanout(std::uint32_t fanout) {
  if (fanout < RTree::kMinFanout || fanout > RTree::kMaxFanout || !std::has_single_bit(fanout)) {
    throw std::invalid_argument("fanout must be a power of two in [4, 4096], got " +
                                std::to_string(fanout));
  }
}

RTree encode_tree(const LogicalTree& logical, Layout layout) {
  check_fanout(logical.fanout);
  if (logical.levels.empty() || logical.levels.back().size() != 1) {
    throw std::invalid_argument("encode_tree: logical tree must end in a single root");
  }
  RTree t;
  t.layout_ = layout;
  t.fanout_ = logical.fanout;
  t.capacity_ = node_capacity(logical.fanout);
  t.sorted_ = logical.sorted_on_lo_x;
  t.stride_ = RTree::kHeaderBytes + 24u * t.capacity_;
  t.levels_.resize(logical.levels.size());

  const Entry pad{Rect::sentinel(), 0};
  for (std::size_t l = 0; l < logical.levels.size(); ++l) {
    const auto& nodes = logical.levels[l];
    auto& slab = t.levels_[l];
    slab.nodes = nodes.size();
    slab.bytes = detail::AlignedBuffer(nodes.size() * t.stride_);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const LogicalNode& ln = nodes[k];
      if (ln.entries.empty() || ln.entries.size() > logical.fanout) {
        throw std::invalid_argument("encode_tree: node entry count outside [1, F]");
      }
      std::byte* p = slab.bytes.data() + k * t.stride_;
      *reinterpret_cast<NodeHeader*>(p) = {static_cast<std::uint32_t>(l),
                                           static_cast<std::uint32_t>(ln.entries.size())};
      for (std::uint32_t i = 0; i < t.capacity_; ++i) {
        write_slot(p, layout, t.capacity_, i, i < ln.entries.size() ? ln.entries[i] : pad);
      }
    }
  }
  for (const LogicalNode& leaf : logical.levels.front()) t.object_count_ += leaf.entries.size();
  return t;
}

LogicalTree decode_tree(const RTree& tree) {
  LogicalTree lt;
  lt.fanout = tree.fanout();
  lt.sorted_on_lo_x = tree.sorted_on_lo_x();
  lt.levels.resize(tree.height());
  for (std::uint32_t l = 0; l < tree.height(); ++l) {
    const std::uint64_t n = tree.level_node_count(l);
    lt.levels[l].resize(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      const NodeRef r(l, k);
      const NodeHeader h = tree.header(r);
      LogicalNode& ln = lt.levels[l][k];
      ln.level = h.level;
      ln.entries.reserve(h.count);
      for (std::uint32_t i = 0; i < h.count; ++i) ln.entries.push_back(tree.entry(r, i));
    }
  }
  return lt;
}

std::uint32_t str_height(std::uint64_t n, std::uint32_t fanout) {
  std::uint32_t h = 1;
  while (n > fanout) {
    n = ceil_div(n, fanout);
    ++h;
  }
  return h;
}

RTree build_str(std::span<const Rect> data, std::uint32_t fanout, Layout layout) {
  std::vector<ObjectId> ids(data.size());
  std::iota(ids.begin(), ids.end(), ObjectId{0});
  return build_str(data, ids, fanout, layout);
}

RTree build_str(std::span<const Rect> data, std::span<const ObjectId> ids, std::uint32_t fanout,
                Layout layout) {
  if (data.empty()) throw std::invalid_argument("build_str: empty data");
  if (ids.size() != data.size()) throw std::invalid_argument("build_str: ids/data size mismatch");
  if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("build_str: more than 2^32 objects");
  }
  check_fanout(fanout);
  check_ingest(data);

  LogicalTree lt;
  lt.fanout = fanout;
  std::vector<Entry> items(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) items[i] = {data[i], ids[i]};

  for (std::uint32_t level = 0;; ++level) {
    lt.levels.push_back(str_pack(items, fanout, level));
    const auto& nodes = lt.levels.back();
    if (nodes.size() == 1) break;
    items.clear();
    items.reserve(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      items.push_back({entries_mbr(nodes[k].entries), NodeRef(level, k).raw()});
    }
  }
  return encode_tree(lt, layout);
}

RTree sort_nodes_by_lo_x(const RTree& tree) {
  LogicalTree lt = decode_tree(tree);
  for (auto& level : lt.levels) {
    for (LogicalNode& node : level) {
      std::stable_sort(node.entries.begin(), node.entries.end(), [](const Entry& a, const Entry& b) {
        if (a.rect.lo_x != b.rect.lo_x) return a.rect.lo_x < b.rect.lo_x;
        return a.rect.lo_y < b.rect.lo_y;
      });
    }
  }
  lt.sorted_on_lo_x = true;
  return encode_tree(lt, tree.layout());
}

RTree convert_layout(const RTree& tree, Layout target) {
  return encode_tree(decode_tree(tree), target);
}

namespace {

std::string where(NodeRef r) {
  return "level " + std::to_string(r.level()) + " slot " + std::to_string(r.slot());
}

}  // namespace

ValidationReport validate(const RTree& tree) {
  ValidationReport rep;
  auto flag = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

  if (tree.height() == 0) {
    flag("tree has no levels");
    return rep;
  }
  if (tree.level_node_count(tree.height() - 1) != 1) flag("top level does not hold exactly one root");

  const Rect sentinel = Rect::sentinel();
  std::uint64_t objects = 0;
  for (std::uint32_t l = 0; l < tree.height(); ++l) {
    const std::uint64_t n = tree.level_node_count(l);
    for (std::uint64_t k = 0; k < n; ++k) {
      const NodeRef r(l, k);
      const NodeHeader h = tree.header(r);
      const bool is_root = l + 1 == tree.height();
      if (h.level != l) flag(where(r) + ": header level " + std::to_string(h.level));
      if (h.count > tree.fanout()) flag(where(r) + ": count exceeds fanout");
      if (h.count == 0) flag(where(r) + ": empty node");
      if (is_root && l > 0 && h.count < 2) flag(where(r) + ": internal root has fewer than 2 entries");
      const std::uint32_t live = std::min(h.count, tree.capacity());

      for (std::uint32_t i = 0; i < live; ++i) {
        const Entry e = tree.entry(r, i);
        if (!rect_valid(e.rect)) flag(where(r) + " entry " + std::to_string(i) + ": invalid rect");
        if (tree.sorted_on_lo_x() && i > 0 && tree.entry(r, i - 1).rect.lo_x > e.rect.lo_x) {
          flag(where(r) + " entry " + std::to_string(i) + ": lo_x order broken in sorted tree");
        }
        if (l == 0) continue;
        const NodeRef c = NodeRef::from_raw(e.ref);
        if (c.level() != l - 1 || c.slot() >= tree.level_node_count(l - 1)) {
          flag(where(r) + " entry " + std::to_string(i) + ": dangling child reference");
          continue;
        }
        if (!(tree.node_mbr(c) == e.rect)) {
          flag(where(r) + " entry " + std::to_string(i) + ": rect differs from union of child " +
               where(c));
        }
      }
      for (std::uint32_t i = live; i < tree.capacity(); ++i) {
        if (!(tree.entry(r, i).rect == sentinel)) {
          flag(where(r) + " slot " + std::to_string(i) + ": padding is not the sentinel rect");
          break;
        }
      }
      if (l == 0) objects += h.count;
    }

    if (l > 0) {
      std::vector<std::uint32_t> refs(tree.level_node_count(l - 1), 0);
      for (std::uint64_t k = 0; k < n; ++k) {
        const NodeRef r(l, k);
        const std::uint32_t live = std::min(tree.header(r).count, tree.capacity());
        for (std::uint32_t i = 0; i < live; ++i) {
          const NodeRef c = NodeRef::from_raw(tree.entry(r, i).ref);
          if (c.level() == l - 1 && c.slot() < refs.size()) ++refs[c.slot()];
        }
      }
      for (std::size_t s = 0; s < refs.size(); ++s) {
        if (refs[s] != 1) {
          flag(where(NodeRef(l - 1, s)) + ": referenced " + std::to_string(refs[s]) + " times");
        }
      }
    }
  }
  if (objects != tree.object_count()) flag("leaf entry total differs from object count");
  return rep;
}

}  // namespace simdrt
