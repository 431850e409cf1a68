#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "lcbench/common/rng.hpp"
#include "lcbench/nn/gaussian.hpp"
#include "lcbench/nn/mlp.hpp"
#include "lcbench/sim/types.hpp"

namespace lcbench::pasac {

struct PasacHyper {
  double gamma = 0.99;
  double tau = 0.005;
  double alpha = 0.05;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;  // shared by the twin critics and the value net
  int batch_size = 128;
  int learning_starts = 500;
  long total_steps = 300000;
  int buffer_capacity = 10000;
  int hidden_units = 256;
  int hidden_layers = 2;

  void validate() const;
};

// Policy, twin soft-Q critics, value net and its slow-moving target. The
// policy emits mean and log-sigma for the three continuous dims
// (acceleration plus the two lane weights); critics score obs + action.
struct NetworkBundle {
  nn::Mlp policy;
  nn::Mlp q1, q2;
  nn::Mlp value;
  nn::Mlp value_target;

  static constexpr int kObsDim = 10;
  static constexpr int kActDim = 3;

  static NetworkBundle make(const PasacHyper& hyper, common::Rng& rng);

  void save(const std::string& path) const;
  static NetworkBundle load(const std::string& path);
};

struct Transition {
  std::array<double, 10> obs{};
  std::array<double, 3> action{};  // (a_cont, k_stay, k_change)
  double reward = 0.0;
  std::array<double, 10> next_obs{};
  bool terminal = false;  // collision only; truncation still bootstraps
};

}  // namespace lcbench::pasac
