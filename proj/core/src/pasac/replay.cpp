#include "lcbench/pasac/replay.hpp"

#include <stdexcept>

namespace lcbench::pasac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  data_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (size_ < capacity_) {
    data_.push_back(t);
    ++size_;
  } else {
    data_[head_] = t;  // overwrite the oldest
  }
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  if (size_ < capacity_) return data_[i];
  return data_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      common::Rng& rng) const {
  if (batch > size_) throw std::invalid_argument("ReplayBuffer: batch exceeds stored count");
  // Floyd's algorithm: exactly `batch` distinct draws.
  std::vector<std::size_t> out;
  out.reserve(batch);
  std::vector<bool> seen(size_, false);
  for (std::size_t j = size_ - batch; j < size_; ++j) {
    std::size_t r = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(j + 1));
    if (r > j) r = j;
    if (seen[r]) r = j;
    seen[r] = true;
    out.push_back(r);
  }
  return out;
}

}  // namespace lcbench::pasac
