#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "simdrt/geom.hpp"
#include "simdrt/join.hpp"

namespace simdrt::testing {

inline std::vector<Rect> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<Rect> out(n);
  for (Rect& r : out) r = Rect::from_point({u(rng), u(rng)});
  return out;
}

inline std::vector<Rect> random_rects(std::size_t n, float max_side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::uniform_real_distribution<float> s(0.0f, max_side);
  std::vector<Rect> out(n);
  for (Rect& r : out) {
    const float x = u(rng), y = u(rng);
    r = {x, y, x + s(rng), y + s(rng)};
  }
  return out;
}

inline Rect random_window(std::mt19937_64& rng, float side) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f - side);
  const float x = u(rng), y = u(rng);
  return {x, y, x + side, y + side};
}

template <class T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<JoinPair> to_pairs(const std::vector<std::pair<ObjectId, ObjectId>>& v) {
  std::vector<JoinPair> out;
  out.reserve(v.size());
  for (const auto& [a, b] : v) out.push_back({a, b});
  return out;
}

}  // namespace simdrt::testing
