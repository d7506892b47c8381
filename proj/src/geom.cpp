#include "simdrt/geom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simdrt {

bool rect_valid(const Rect& r) {
  return std::isfinite(r.lo_x) && std::isfinite(r.lo_y) && std::isfinite(r.hi_x) &&
         std::isfinite(r.hi_y) && r.lo_x <= r.hi_x && r.lo_y <= r.hi_y;
}

void check_ingest(std::span<const Rect> rects) {
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (!rect_valid(rects[i])) {
      throw std::invalid_argument("rect " + std::to_string(i) +
                                  " is not finite or has inverted bounds");
    }
  }
}

std::vector<ObjectId> oracle_select(std::span<const Rect> data, const Rect& q) {
  std::vector<ObjectId> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (rect_intersects(data[i], q)) out.push_back(i);
  }
  return out;
}

std::vector<std::pair<ObjectId, ObjectId>> oracle_join(std::span<const Rect> a,
                                                       std::span<const Rect> b) {
  std::vector<std::pair<ObjectId, ObjectId>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Rect& ra = a[i];
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (rect_intersects(ra, b[j])) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace simdrt
