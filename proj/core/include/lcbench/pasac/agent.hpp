#pragma once

#include <array>
#include <vector>

#include "lcbench/action.hpp"
#include "lcbench/pasac/replay.hpp"
#include "lcbench/pasac/types.hpp"

namespace lcbench::pasac {

// Fixed observation scaling: gaps by sensing range, speeds by 25 m/s,
// acceleration by 5 m/s^2.
std::array<double, 10> normalize_obs(const sim::Observation& obs, double sensing_range);

inline constexpr double kSpeedScale = 25.0;
inline constexpr double kAccelScale = 5.0;

// Per-dimension output ranges of the squashed policy: acceleration on
// [a_min, a_max], both lane weights on [0, 1].
std::vector<nn::Bounds> action_bounds(double a_min, double a_max);

HybridAction select_action(const NetworkBundle& bundle, const std::array<double, 10>& norm_obs,
                           const std::vector<nn::Bounds>& bounds, bool deterministic,
                           common::Rng* rng);

// Minibatch assembled from the replay buffer; observations are normalized,
// actions raw.
struct Batch {
  Eigen::MatrixXd obs;       // B x 10
  Eigen::MatrixXd action;    // B x 3
  Eigen::VectorXd reward;    // B
  Eigen::MatrixXd next_obs;  // B x 10
  Eigen::VectorXd terminal;  // B, 1.0 for collision transitions

  std::size_t size() const { return static_cast<std::size_t>(obs.rows()); }
};

Batch make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices,
                 double sensing_range);

struct QLossResult {
  double loss = 0.0;
  nn::Gradients grad_q1, grad_q2;
};

struct VLossResult {
  double loss = 0.0;
  nn::Gradients grad_value;
};

struct PolicyLossResult {
  double loss = 0.0;
  nn::Gradients grad_policy;
};

// Twin-critic Bellman residual against r + gamma * V_target(s') (no bootstrap
// on terminal transitions), averaged over batch and both critics.
QLossResult q_loss(const NetworkBundle& bundle, const Batch& batch, const PasacHyper& hyper);

// Value regression toward min-twin Q of a freshly sampled action minus the
// scaled log-probability. noise is B x 3 standard normal, fixed by the caller.
VLossResult v_loss(const NetworkBundle& bundle, const Batch& batch, const PasacHyper& hyper,
                   const Eigen::MatrixXd& noise, const std::vector<nn::Bounds>& bounds);

// Reparameterized policy objective alpha * log pi - min-twin Q.
PolicyLossResult policy_loss(const NetworkBundle& bundle, const Batch& batch,
                             const PasacHyper& hyper, const Eigen::MatrixXd& noise,
                             const std::vector<nn::Bounds>& bounds);

// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(nn::Mlp& target, const nn::Mlp& source, double tau);

// Critic input row: normalized observation then (a_cont / accel scale, k0, k1).
Eigen::MatrixXd critic_input(const Eigen::MatrixXd& norm_obs, const Eigen::MatrixXd& action_raw);

}  // namespace lcbench::pasac
