#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simdrt/geom.hpp"

namespace simdrt {

/// Physical node layouts.
///   d0: interleaved (lo_x, lo_y, hi_x, hi_y, ref) entries
///   d1: five parallel arrays lx[], ly[], hx[], hy[], ptr[]
///   d2: lo[] of (lo_x, lo_y) pairs, hi[] of (hi_x, hi_y) pairs, ptr[]
enum class Layout : std::uint32_t { d0 = 0, d1 = 1, d2 = 2 };

Layout parse_layout(std::string_view name);
std::string_view to_string(Layout l);

/// 64-bit node reference: level in the top 16 bits, slot within that level's slab below.
class NodeRef {
 public:
  static constexpr int kSlotBits = 48;
  static constexpr std::uint64_t kSlotMask = (std::uint64_t{1} << kSlotBits) - 1;

  constexpr NodeRef() = default;
  constexpr NodeRef(std::uint32_t level, std::uint64_t slot)
      : raw_((std::uint64_t{level} << kSlotBits) | (slot & kSlotMask)) {}

  static constexpr NodeRef from_raw(std::uint64_t raw) {
    NodeRef r;
    r.raw_ = raw;
    return r;
  }

  constexpr std::uint64_t raw() const { return raw_; }
  constexpr std::uint32_t level() const { return static_cast<std::uint32_t>(raw_ >> kSlotBits); }
  constexpr std::uint64_t slot() const { return raw_ & kSlotMask; }

  friend constexpr bool operator==(NodeRef, NodeRef) = default;

 private:
  std::uint64_t raw_ = 0;
};

/// One logical entry: an MBR plus a child node reference (internal) or object id (leaf).
struct Entry {
  Rect rect;
  std::uint64_t ref = 0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct NodeHeader {
  std::uint32_t level;
  std::uint32_t count;
};

struct D0Entry {
  Coord lo_x, lo_y, hi_x, hi_y;
  std::uint64_t ref;
};
static_assert(sizeof(D0Entry) == 24);

struct NodeD0View {
  std::uint32_t level;
  std::uint32_t count;
  const D0Entry* entries;
};

struct NodeD1View {
  std::uint32_t level;
  std::uint32_t count;
  const Coord* lx;
  const Coord* ly;
  const Coord* hx;
  const Coord* hy;
  const std::uint64_t* ptr;
};

struct NodeD2View {
  std::uint32_t level;
  std::uint32_t count;
  const Coord* lo;  // lo[2i] = lo_x, lo[2i+1] = lo_y
  const Coord* hi;
  const std::uint64_t* ptr;
};

struct LogicalNode {
  std::uint32_t level = 0;
  std::vector<Entry> entries;

  friend bool operator==(const LogicalNode&, const LogicalNode&) = default;
};

/// Layout-free form of a tree. levels[0] holds the leaves; levels.back() holds only the root.
struct LogicalTree {
  std::uint32_t fanout = 0;
  bool sorted_on_lo_x = false;
  std::vector<std::vector<LogicalNode>> levels;

  friend bool operator==(const LogicalTree&, const LogicalTree&) = default;
};

namespace detail {

class AlignedBuffer {
 public:
  static constexpr std::size_t kAlign = 64;

  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t bytes);
  AlignedBuffer(const AlignedBuffer& other);
  AlignedBuffer& operator=(const AlignedBuffer& other);
  AlignedBuffer(AlignedBuffer&&) noexcept = default;
  AlignedBuffer& operator=(AlignedBuffer&&) noexcept = default;

  std::byte* data() { return data_.get(); }
  const std::byte* data() const { return data_.get(); }
  std::size_t size() const { return size_; }

 private:
  struct Free {
    void operator()(std::byte* p) const;
  };
  std::unique_ptr<std::byte[], Free> data_;
  std::size_t size_ = 0;
};

}  // namespace detail

/// Immutable bulk-loaded R-tree stored as one aligned slab per level.
///
/// Every node has room for capacity() = max(F, 16) entries so any supported
/// lane width can run full-register loops; slots past `count` hold
/// Rect::sentinel(). Node storage is 64-byte aligned with stride
/// 64 + 24 * capacity() bytes in every layout.
class RTree {
 public:
  static constexpr std::uint32_t kMinCapacity = 16;
  static constexpr std::size_t kHeaderBytes = 64;
  static constexpr std::uint32_t kMinFanout = 4;
  static constexpr std::uint32_t kMaxFanout = 4096;

  RTree() = default;

  Layout layout() const { return layout_; }
  std::uint32_t fanout() const { return fanout_; }
  std::uint32_t capacity() const { return capacity_; }
  std::uint32_t height() const { return static_cast<std::uint32_t>(levels_.size()); }
  bool sorted_on_lo_x() const { return sorted_; }
  std::uint64_t object_count() const { return object_count_; }
  std::size_t node_stride() const { return stride_; }
  std::uint64_t node_count() const;
  std::uint64_t level_node_count(std::uint32_t level) const { return levels_.at(level).nodes; }
  NodeRef root() const { return NodeRef(height() - 1, 0); }

  const std::byte* node_data(NodeRef r) const {
    return levels_[r.level()].bytes.data() + r.slot() * stride_;
  }
  std::span<const std::byte> level_bytes(std::uint32_t level) const;

  NodeHeader header(NodeRef r) const {
    return *reinterpret_cast<const NodeHeader*>(node_data(r));
  }

  NodeD0View d0(NodeRef r) const {
    const std::byte* p = node_data(r);
    const auto* h = reinterpret_cast<const NodeHeader*>(p);
    return {h->level, h->count, reinterpret_cast<const D0Entry*>(p + kHeaderBytes)};
  }

  NodeD1View d1(NodeRef r) const {
    const std::byte* p = node_data(r);
    const auto* h = reinterpret_cast<const NodeHeader*>(p);
    const auto* c = reinterpret_cast<const Coord*>(p + kHeaderBytes);
    return {h->level, h->count, c, c + capacity_, c + 2 * capacity_, c + 3 * capacity_,
            reinterpret_cast<const std::uint64_t*>(c + 4 * capacity_)};
  }

  NodeD2View d2(NodeRef r) const {
    const std::byte* p = node_data(r);
    const auto* h = reinterpret_cast<const NodeHeader*>(p);
    const auto* c = reinterpret_cast<const Coord*>(p + kHeaderBytes);
    return {h->level, h->count, c, c + 2 * capacity_,
            reinterpret_cast<const std::uint64_t*>(c + 4 * capacity_)};
  }

  /// Layout-independent read of slot i (padding slots included).
  Entry entry(NodeRef r, std::uint32_t i) const;

  /// Union of the node's live entries.
  Rect node_mbr(NodeRef r) const;

  /// Rewrites one slot in place. Exists for fault-injection tests of validate().
  void overwrite_entry(NodeRef r, std::uint32_t i, const Entry& e);

  friend RTree encode_tree(const LogicalTree& logical, Layout layout);
  friend RTree load_snapshot(std::istream& in);

 private:
  struct Slab {
    std::uint64_t nodes = 0;
    detail::AlignedBuffer bytes;
  };

  std::byte* mutable_node(NodeRef r) { return levels_[r.level()].bytes.data() + r.slot() * stride_; }

  Layout layout_ = Layout::d0;
  std::uint32_t fanout_ = 0;
  std::uint32_t capacity_ = 0;
  bool sorted_ = false;
  std::uint64_t object_count_ = 0;
  std::size_t stride_ = 0;
  std::vector<Slab> levels_;
};

/// Node capacity for a fanout: max(F, 16).
constexpr std::uint32_t node_capacity(std::uint32_t fanout) {
  return fanout < RTree::kMinCapacity ? RTree::kMinCapacity : fanout;
}

/// Throws std::invalid_argument unless F is a power of two in [4, 4096].
void check_fanout(std::uint32_t fanout);

/// Sort-Tile-Recursive bulk load. Object ids default to input positions.
RTree build_str(std::span<const Rect> data, std::uint32_t fanout, Layout layout);
RTree build_str(std::span<const Rect> data, std::span<const ObjectId> ids, std::uint32_t fanout,
                Layout layout);

/// Levels produced by build_str for n objects at fanout F.
std::uint32_t str_height(std::uint64_t n, std::uint32_t fanout);

RTree encode_tree(const LogicalTree& logical, Layout layout);
LogicalTree decode_tree(const RTree& tree);

/// Orders every node's entries by (lo_x, lo_y, original slot).
RTree sort_nodes_by_lo_x(const RTree& tree);

RTree convert_layout(const RTree& tree, Layout target);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const RTree& tree);

/// Binary snapshot; see docs/snapshot_format.md.
void save_snapshot(const RTree& tree, std::ostream& out);
RTree load_snapshot(std::istream& in);
void save_snapshot(const RTree& tree, const std::string& path);
RTree load_snapshot(const std::string& path);

}  // namespace simdrt
