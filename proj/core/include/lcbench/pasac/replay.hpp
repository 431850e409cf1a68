#pragma once

#include <cstddef>
#include <vector>

#include "lcbench/common/rng.hpp"
#include "lcbench/pasac/types.hpp"

namespace lcbench::pasac {

// Bounded FIFO of transitions with strictly oldest-first eviction and
// uniform without-replacement batch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Distinct indices into insertion order; batch must not exceed size().
  std::vector<std::size_t> sample_indices(std::size_t batch, common::Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  std::vector<Transition> data_;
};

}  // namespace lcbench::pasac
