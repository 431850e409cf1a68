#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcbench/pasac/agent.hpp"
#include "lcbench/sim/simulation.hpp"

namespace lcbench::pasac {

struct EpisodeRecord {
  long env_step = 0;  // global step count at episode end
  int episode_index = 0;
  double episode_return = 0.0;
  int episode_length = 0;
  bool collided = false;
};

struct TrainResult {
  long env_steps = 0;
  int episodes = 0;
  std::vector<EpisodeRecord> curve;
};

// One gradient step per environment step after learning_starts: critics,
// value, policy, then the soft target update. Fully deterministic in
// (config, hyper, seed). Writes the training curve CSV
// (env_step, episode_index, episode_return, episode_length, collided) and
// aborts with a diagnostic checkpoint on a non-finite loss.
TrainResult train(const sim::SimConfig& sim_cfg, const PasacHyper& hyper, NetworkBundle& bundle,
                  std::uint64_t seed, const std::string& curve_csv_path,
                  const std::string& abort_checkpoint_path = "");

}  // namespace lcbench::pasac
