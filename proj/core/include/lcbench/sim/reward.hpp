#pragma once

#include "lcbench/sim/types.hpp"

namespace lcbench::sim {

// Spacing penalty input: how far a gap falls short of the safe distance.
// Gaps at or beyond d_safe carry no penalty.
inline double gap_shortfall(double gap, double d_safe) {
  return gap < d_safe ? d_safe - gap : 0.0;
}

// Per-step reward for the transition prev -> cur.
//   r_act   = -w0 * |y_cur - y_prev|, gated off when the previous preceding
//             gap was already at least d_safe
//   r_act1  = -w1 * shortfall(d_p) - w2 * shortfall(d_f) - w3 * |v - v_safe|
//   r_act2  = -w4 * |jerk|
//   r_collision_term = r_collision on a colliding step
// Distance terms read the sentinel-clamped gaps of the observation.
RewardBreakdown compute_reward(const Observation& prev_obs, int prev_lane,
                               const Observation& cur_obs, int cur_lane,
                               double jerk, bool collided, const SimConfig& cfg);

}  // namespace lcbench::sim
