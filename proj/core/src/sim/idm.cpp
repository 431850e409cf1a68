#include "lcbench/sim/idm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lcbench::sim {

double idm_free_accel(double v, double desired_speed, const IdmParams& p) {
  const double ratio = desired_speed > 0.0 ? v / desired_speed : 1.0;
  return p.max_accel * (1.0 - std::pow(ratio, p.exponent));
}

double idm_accel(double v, double desired_speed, double gap, double v_leader,
                 const IdmParams& p) {
  if (gap <= 0.0) return -std::numeric_limits<double>::infinity();
  const double dv = v - v_leader;
  const double s_star =
      p.min_gap + std::max(0.0, v * p.time_headway +
                                    v * dv / (2.0 * std::sqrt(p.max_accel * p.comfort_brake)));
  const double ratio = desired_speed > 0.0 ? v / desired_speed : 1.0;
  return p.max_accel * (1.0 - std::pow(ratio, p.exponent) - (s_star / gap) * (s_star / gap));
}

double npc_accel(const VehicleState& follower, const VehicleState* leader,
                 const SimConfig& cfg) {
  if (follower.is_ego) throw std::invalid_argument("npc_accel: follower is the ego");
  IdmParams p;
  p.max_accel = cfg.a_max;
  double a;
  if (leader == nullptr) {
    a = idm_free_accel(follower.v, follower.desired_speed, p);
  } else {
    const double gap = leader->s - follower.s - cfg.vehicle_length;
    if (gap >= cfg.sensing_range) {
      a = idm_free_accel(follower.v, follower.desired_speed, p);
    } else {
      a = idm_accel(follower.v, follower.desired_speed, gap, leader->v, p);
    }
  }
  return std::clamp(a, cfg.a_min, cfg.a_max);
}

}  // namespace lcbench::sim
