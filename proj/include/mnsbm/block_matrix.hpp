#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

namespace mnsbm {

// Dense symmetric matrix over block labels 0..L-1. Storage keeps both
// triangles so row scans are contiguous; capacity grows geometrically so
// adding a block is amortised O(L).
template <typename T>
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(std::size_t size) { resize(size); }

  std::size_t size() const { return size_; }

  const T& operator()(std::size_t a, std::size_t b) const { return data_[a * capacity_ + b]; }

  void set(std::size_t a, std::size_t b, T value) {
    data_[a * capacity_ + b] = value;
    data_[b * capacity_ + a] = value;
  }

  void add(std::size_t a, std::size_t b, T delta) {
    data_[a * capacity_ + b] += delta;
    if (a != b) data_[b * capacity_ + a] += delta;
  }

  // New trailing row/column, zero-filled.
  void push_block() { resize(size_ + 1); }

  // Moves the last block into slot `b` and drops the last row/column.
  void remove_block(std::size_t b) {
    assert(b < size_);
    const std::size_t last = size_ - 1;
    if (b != last) {
      for (std::size_t m = 0; m < size_; ++m) {
        if (m == b || m == last) continue;
        set(b, m, (*this)(last, m));
      }
      set(b, b, (*this)(last, last));
    }
    for (std::size_t m = 0; m < size_; ++m) set(last, m, T{});
    --size_;
  }

  void resize(std::size_t size) {
    if (size > capacity_) {
      std::size_t cap = std::max<std::size_t>(4, capacity_);
      while (cap < size) cap *= 2;
      std::vector<T> grown(cap * cap, T{});
      for (std::size_t a = 0; a < size_; ++a)
        std::copy_n(data_.begin() + a * capacity_, size_, grown.begin() + a * cap);
      data_ = std::move(grown);
      capacity_ = cap;
    }
    for (std::size_t a = size; a < size_; ++a)
      for (std::size_t m = 0; m < size_; ++m) set(a, m, T{});
    size_ = size;
  }

  void fill(T value) {
    for (std::size_t a = 0; a < size_; ++a)
      std::fill_n(data_.begin() + a * capacity_, size_, value);
  }

  friend bool operator==(const BlockMatrix& x, const BlockMatrix& y) {
    if (x.size_ != y.size_) return false;
    for (std::size_t a = 0; a < x.size_; ++a)
      for (std::size_t b = 0; b < x.size_; ++b)
        if (!(x(a, b) == y(a, b))) return false;
    return true;
  }

 private:
  std::size_t size_ = 0;
  std::size_t capacity_ = 0;
  std::vector<T> data_;
};

}  // namespace mnsbm
