#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "coex/rng.hpp"

namespace coex {

/// Fixed-capacity FIFO ring. Index 0 is the oldest stored record.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
    data_.reserve(capacity);
  }

  void push(const T& item) {
    if (data_.size() < capacity_) {
      data_.push_back(item);
    } else {
      data_[head_] = item;
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }

  const T& operator[](std::size_t i) const { return data_[(head_ + i) % data_.size()]; }

  /// Uniform sample with replacement.
  void sample(Rng& rng, std::size_t count, std::vector<T>& out) const {
    if (data_.empty()) throw std::logic_error("sample from empty replay buffer");
    out.clear();
    for (std::size_t i = 0; i < count; ++i) out.push_back(data_[uniform_below(rng, data_.size())]);
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest record once full
  std::vector<T> data_;
};

}  // namespace coex
