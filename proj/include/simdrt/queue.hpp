#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace simdrt {

/// Flat growable array of 64-bit references written by vector stores.
/// ensure_tail(n) guarantees n writable slots past size(); the kernel writes
/// there and commit() publishes what it wrote.
class RefBuffer {
 public:
  explicit RefBuffer(std::size_t initial_capacity = 1024)
      : storage_(std::bit_ceil(initial_capacity < 16 ? std::size_t{16} : initial_capacity)) {}

  std::uint64_t* ensure_tail(std::size_t n) {
    if (size_ + n > storage_.size()) grow(size_ + n);
    return storage_.data() + size_;
  }
  void commit(std::size_t n) { size_ += n; }
  void push_back(std::uint64_t v) {
    *ensure_tail(1) = v;
    ++size_;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t capacity() const { return storage_.size(); }
  void clear() { size_ = 0; }
  void truncate(std::size_t n) { size_ = n < size_ ? n : size_; }
  std::span<const std::uint64_t> view() const { return {storage_.data(), size_}; }
  std::uint64_t operator[](std::size_t i) const { return storage_[i]; }

 private:
  void grow(std::size_t need);

  std::vector<std::uint64_t> storage_;
  std::size_t size_ = 0;
};

/// FIFO of node references over a flat power-of-two array. Batched enqueue
/// goes through ensure_tail()/commit() so one compress-store can append up to
/// a register's worth of references. When the tail runs out of room, live
/// entries are shifted to the front if that frees at least half the storage;
/// otherwise capacity doubles. Both are amortized O(1) per element.
class TraversalQueue {
 public:
  static constexpr std::size_t kInitialCapacity = 1024;

  explicit TraversalQueue(std::size_t initial_capacity = kInitialCapacity)
      : storage_(std::bit_ceil(initial_capacity < 16 ? std::size_t{16} : initial_capacity)) {}

  std::uint64_t* ensure_tail(std::size_t n) {
    if (tail_ + n > storage_.size()) make_room(n);
    return storage_.data() + tail_;
  }
  void commit(std::size_t n) { tail_ += n; }
  void push(std::uint64_t v) {
    *ensure_tail(1) = v;
    ++tail_;
  }

  std::uint64_t pop() { return storage_[head_++]; }
  /// k-th live entry after the head (0 = next to be popped).
  std::uint64_t peek(std::size_t k) const { return storage_[head_ + k]; }

  std::size_t size() const { return tail_ - head_; }
  bool empty() const { return head_ == tail_; }
  std::size_t capacity() const { return storage_.size(); }
  void clear() { head_ = tail_ = 0; }

 private:
  void make_room(std::size_t n);

  std::vector<std::uint64_t> storage_;
  std::size_t head_ = 0;
  std::size_t tail_ = 0;
};

}  // namespace simdrt
