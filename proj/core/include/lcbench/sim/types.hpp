#pragma once

#include <array>
#include <cstdint>

namespace lcbench::sim {

struct SimConfig {
  double road_length = 1000.0;   // m
  int lane_count = 2;
  double lane_width = 3.2;       // m
  double dt = 0.1;               // s
  double a_min = -4.5;           // m/s^2
  double a_max = 2.6;            // m/s^2
  double v_safe = 13.89;         // m/s
  double d_safe = 25.0;          // m
  double r_collision = -200.0;
  double w0 = 3.13;
  double w1 = 0.5;
  double w2 = 0.4;
  double w3 = 0.72;
  double w4 = 0.5;
  double flow_density = 0.11;    // vehicles / s, both lanes combined
  double sensing_range = 150.0;  // m
  double vehicle_length = 5.0;   // m
  double ego_init_speed = 13.89;     // m/s
  double leader_init_speed = 12.89;  // m/s
  double spawn_buffer = 50.0;        // m
  int max_steps = 700;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct VehicleState {
  std::uint32_t id = 0;
  int lane = 0;
  double s = 0.0;       // longitudinal position of the front bumper, m
  double v = 0.0;       // m/s, never negative
  double a = 0.0;       // applied acceleration over the last step, m/s^2
  double a_prev = 0.0;  // acceleration of the step before, m/s^2
  bool is_ego = false;
  double desired_speed = 0.0;  // car-following free-flow target (spawn speed)
};

// The ten-component controller input: gaps and speeds around the ego in its
// own lane and the target (other) lane. Gaps are bumper-to-bumper, clamped
// to [0, sensing_range]; a missing neighbor reads as gap = sensing_range
// with speed = v_safe.
struct Observation {
  double d_p = 0.0;   // gap to preceding vehicle, ego lane
  double d_f = 0.0;   // gap to following vehicle, ego lane
  double d_tp = 0.0;  // gap to preceding vehicle, target lane
  double d_tf = 0.0;  // gap to following vehicle, target lane
  double v_tp = 0.0;
  double v_tf = 0.0;
  double v_ego = 0.0;
  double a_ego = 0.0;
  double v_p = 0.0;
  double v_f = 0.0;

  std::array<double, 10> as_array() const {
    return {d_p, d_f, d_tp, d_tf, v_tp, v_tf, v_ego, a_ego, v_p, v_f};
  }
};

struct RewardBreakdown {
  double r_act = 0.0;             // lane-change penalty (gated)
  double r_act1 = 0.0;            // spacing and speed tracking
  double r_act2 = 0.0;            // jerk comfort
  double r_collision_term = 0.0;  // collision penalty on the colliding step
  double total = 0.0;
};

struct StepResult {
  Observation observation;
  RewardBreakdown reward;
  bool collided = false;
  bool reached_end = false;
  bool truncated = false;

  bool done() const { return collided || reached_end || truncated; }
};

}  // namespace lcbench::sim
