#include "simdrt/queue.hpp"

#include <cstring>

// Out of line so the AVX-512 translation unit never emits its own copy.

namespace simdrt {

void RefBuffer::grow(std::size_t need) { storage_.resize(std::bit_ceil(need)); }

void TraversalQueue::make_room(std::size_t n) {
  const std::size_t live = tail_ - head_;
  if (head_ > 0 && live + n <= storage_.size() / 2) {
    std::memmove(storage_.data(), storage_.data() + head_, live * sizeof(std::uint64_t));
    head_ = 0;
    tail_ = live;
    return;
  }
  if (head_ > 0) {
    std::memmove(storage_.data(), storage_.data() + head_, live * sizeof(std::uint64_t));
    head_ = 0;
    tail_ = live;
  }
  std::size_t cap = storage_.size();
  while (cap < live + n) cap *= 2;
  if (cap == storage_.size()) cap *= 2;
  storage_.resize(cap);
}

}  // namespace simdrt
