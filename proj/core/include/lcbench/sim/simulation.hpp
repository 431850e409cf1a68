#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lcbench/action.hpp"
#include "lcbench/common/rng.hpp"
#include "lcbench/sim/types.hpp"

namespace lcbench::sim {

// True iff any two vehicles share a lane with a strictly negative
// bumper-to-bumper gap. ego_involved reports whether the ego is part of
// some overlapping pair.
bool detect_collision(const std::vector<VehicleState>& vehicles, const SimConfig& cfg,
                      bool* ego_involved = nullptr);

// Deterministic two-lane kinematic traffic simulator. All randomness flows
// from the reset seed; identical (config, seed, action sequence) produce a
// bit-identical episode.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, std::uint64_t seed);

  // Scenario setup from an explicit vehicle list (exactly one is_ego);
  // used for crafted situations in tests and tools.
  static Simulation from_vehicles(const SimConfig& cfg, std::vector<VehicleState> vehicles,
                                  std::uint64_t seed);

  void reset(std::uint64_t seed);

  // Advances one step. Throws std::logic_error if the episode is over.
  StepResult step(const HybridAction& action);

  Observation observe() const;  // ego perspective, sentinel-clamped

  const SimConfig& config() const { return cfg_; }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }
  const VehicleState& ego() const { return vehicles_[ego_index_]; }
  int step_count() const { return step_count_; }
  double ego_jerk() const { return (ego().a - ego().a_prev) / cfg_.dt; }

  bool collided() const { return collided_; }
  bool reached_end() const { return reached_end_; }
  bool truncated() const { return truncated_; }
  bool done() const { return collided_ || reached_end_ || truncated_; }

  // Bitwise state comparison, used by determinism tests.
  bool same_state(const Simulation& other) const;

 private:
  void seed_initial_traffic();
  void spawn_arrival();
  const VehicleState* neighbor_ahead(int lane, double s) const;
  const VehicleState* neighbor_behind(int lane, double s) const;

  SimConfig cfg_;
  common::Rng rng_;
  std::vector<VehicleState> vehicles_;  // ego always at index 0
  std::size_t ego_index_ = 0;
  std::uint32_t next_id_ = 0;
  int step_count_ = 0;
  bool collided_ = false;
  bool reached_end_ = false;
  bool truncated_ = false;
};

}  // namespace lcbench::sim
