#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace simdrt {

/// 32-bit key scalar used for every coordinate lane.
using Coord = float;

using ObjectId = std::uint64_t;

struct Point {
  Coord x = 0;
  Coord y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle with closed bounds: lo_x <= hi_x, lo_y <= hi_y.
struct Rect {
  Coord lo_x = 0;
  Coord lo_y = 0;
  Coord hi_x = 0;
  Coord hi_y = 0;

  static constexpr Rect from_point(Point p) { return {p.x, p.y, p.x, p.y}; }

  /// The empty rectangle used to pad unused node slots. It intersects nothing
  /// under closed-interval semantics, including itself.
  static constexpr Rect sentinel() {
    constexpr Coord inf = std::numeric_limits<Coord>::infinity();
    return {inf, inf, -inf, -inf};
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Closed-interval test: rectangles that share only an edge or a corner intersect.
constexpr bool rect_intersects(const Rect& a, const Rect& b) {
  return !(a.lo_x > b.hi_x || a.hi_x < b.lo_x || a.lo_y > b.hi_y || a.hi_y < b.lo_y);
}

constexpr Rect rect_union(const Rect& a, const Rect& b) {
  return {a.lo_x < b.lo_x ? a.lo_x : b.lo_x, a.lo_y < b.lo_y ? a.lo_y : b.lo_y,
          a.hi_x > b.hi_x ? a.hi_x : b.hi_x, a.hi_y > b.hi_y ? a.hi_y : b.hi_y};
}

/// True when every coordinate is finite and both axes are ordered.
bool rect_valid(const Rect& r);

/// Throws std::invalid_argument naming the first rectangle that fails rect_valid.
/// NaN coordinates are rejected here so the query kernels never have to test for them.
void check_ingest(std::span<const Rect> rects);

/// Linear-scan oracle: ids (positions) of every rect intersecting q, ascending.
std::vector<ObjectId> oracle_select(std::span<const Rect> data, const Rect& q);

/// Nested-loop oracle: every (i, j) with rect_intersects(a[i], b[j]), sorted.
std::vector<std::pair<ObjectId, ObjectId>> oracle_join(std::span<const Rect> a,
                                                       std::span<const Rect> b);

}  // namespace simdrt
