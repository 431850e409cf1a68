#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lcbench/sim/types.hpp"

namespace lcbench::mpc {

struct MpcConfig {
  int horizon = 5;   // N
  double ts = 0.1;   // s
  double w1 = 0.5;
  double w2 = 0.4;
  double w3 = 0.72;
  double w4 = 0.5;
  double d_safe = 25.0;
  double v_safe = 13.89;
  double a_min = -4.5;
  double a_max = 2.6;
  double j_th = 0.8;  // current-lane cost threshold, per-step
  double k_p = 0.1;   // extra weight a target lane must beat
  // Quadratic safety shortfalls: the front term ramps up below d_safe, the
  // rear term (target lane only) below rear_critical_gap. Both vanish at
  // comfortable gaps.
  double barrier_weight = 0.5;
  double rear_critical_gap = 15.0;
  int seed_levels = 7;       // constant-sequence grid used to seed the solver
  int sweeps = 40;           // coordinate-descent sweep cap
  double init_step = 1.0;    // m/s^2
  double tol = 1e-8;         // stop once the shrinking step falls below this
  bool literal_matrix = false;  // verbatim state-matrix propagation mode

  static MpcConfig from_sim(const sim::SimConfig& s);
  void validate() const;
};

// Seven-component prediction state around one lane role.
struct MpcState {
  double d_p = 0.0;
  double d_f = 0.0;
  double v_ego = 0.0;
  double dv_p = 0.0;  // v_p - v_ego
  double dv_f = 0.0;  // v_ego - v_f
  double a_ego = 0.0;
  double jerk = 0.0;
};

enum class LaneRole { current, target };

MpcState mpc_state_from_observation(const sim::Observation& obs, LaneRole role, double jerk);

// Propagates x0 under the control sequence with leader/follower speeds frozen
// at their time-0 values. Returns horizon+1 states including x0. The literal
// matrix mode applies the fixed-coefficient state matrices verbatim instead.
std::vector<MpcState> predict(const MpcState& x0, std::span<const double> u,
                              const MpcConfig& cfg);

// Per-step-averaged stage cost over k = 1..N. The following-distance term
// applies to the target lane only.
double horizon_cost(std::span<const MpcState> traj, LaneRole role, const MpcConfig& cfg);

struct MpcSolution {
  std::vector<double> u;
  double cost = 0.0;
  double first_control = 0.0;
};

// Bounded-control minimization: constant-sequence grid seeding followed by
// cyclic coordinate descent with a shrinking step. Optionally records the
// best cost after each sweep.
MpcSolution solve(const MpcState& x0, LaneRole role, const MpcConfig& cfg,
                  std::vector<double>* sweep_costs = nullptr);

struct TlaccDecision {
  int lane_switch = 0;  // 1 = move to the other lane this step
  double u_d = 0.0;     // acceleration command
};

struct TlaccLog {
  double j_current = 0.0;
  std::optional<double> j_target;  // empty when short-circuited
};

// The lane-switch rule on already-computed costs: stay while the current
// lane is cheap; otherwise switch only if the target beats it with margin.
bool tlacc_switch_rule(double j_current, double j_target, const MpcConfig& cfg);

// Two-lane decision: solve the current lane; below j_th keep it without
// looking at the other lane, else compare against the target-lane solution.
TlaccDecision tlacc_decide(const sim::Observation& obs, double jerk, const MpcConfig& cfg,
                           TlaccLog* log = nullptr);

}  // namespace lcbench::mpc
