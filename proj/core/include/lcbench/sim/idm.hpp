#pragma once

#include "lcbench/sim/types.hpp"

namespace lcbench::sim {

// Intelligent-Driver-Model parameters for the surrounding traffic. The
// desired speed is per vehicle (its spawn speed); the rest are fixed.
struct IdmParams {
  double time_headway = 1.5;   // s
  double min_gap = 2.5;        // m
  double comfort_brake = 2.0;  // m/s^2
  double exponent = 4.0;
  double max_accel = 2.6;      // m/s^2, mirrors SimConfig::a_max
};

// IDM acceleration for a follower with a leader `gap` meters ahead moving at
// `v_leader`. Pass gap >= sensing range (or a negative speed diff via the
// free overload) for the free-road term.
double idm_accel(double v, double desired_speed, double gap, double v_leader,
                 const IdmParams& p);
double idm_free_accel(double v, double desired_speed, const IdmParams& p);

// Car-following acceleration for a non-ego vehicle, clamped to
// [cfg.a_min, cfg.a_max]. A leader at or beyond sensing range counts as
// absent.
double npc_accel(const VehicleState& follower, const VehicleState* leader,
                 const SimConfig& cfg);

}  // namespace lcbench::sim
