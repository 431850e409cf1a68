#include "lcbench/sim/reward.hpp"

#include <cmath>

namespace lcbench::sim {

RewardBreakdown compute_reward(const Observation& prev_obs, int prev_lane,
                               const Observation& cur_obs, int cur_lane,
                               double jerk, bool collided, const SimConfig& cfg) {
  RewardBreakdown r;

  const double dy = cfg.lane_width * std::abs(cur_lane - prev_lane);
  // Lane changes made with a comfortable gap ahead are not penalized.
  r.r_act = prev_obs.d_p >= cfg.d_safe ? 0.0 : -cfg.w0 * dy;

  r.r_act1 = -cfg.w1 * gap_shortfall(cur_obs.d_p, cfg.d_safe) -
             cfg.w2 * gap_shortfall(cur_obs.d_f, cfg.d_safe) -
             cfg.w3 * std::abs(cur_obs.v_ego - cfg.v_safe);

  r.r_act2 = -cfg.w4 * std::abs(jerk);

  r.r_collision_term = collided ? cfg.r_collision : 0.0;

  r.total = r.r_act + r.r_act1 + r.r_act2 + r.r_collision_term;
  return r;
}

}  // namespace lcbench::sim
