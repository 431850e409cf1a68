#include "lcbench/mpc/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lcbench/sim/reward.hpp"

namespace lcbench::mpc {

MpcConfig MpcConfig::from_sim(const sim::SimConfig& s) {
  MpcConfig c;
  c.ts = s.dt;
  c.w1 = s.w1;
  c.w2 = s.w2;
  c.w3 = s.w3;
  c.w4 = s.w4;
  c.d_safe = s.d_safe;
  c.v_safe = s.v_safe;
  c.a_min = s.a_min;
  c.a_max = s.a_max;
  return c;
}

void MpcConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("MpcConfig: horizon must be at least 1");
  if (ts <= 0) throw std::invalid_argument("MpcConfig: ts must be positive");
  if (j_th <= 0) throw std::invalid_argument("MpcConfig: j_th must be positive");
  if (k_p < 0) throw std::invalid_argument("MpcConfig: k_p must be nonnegative");
  if (barrier_weight < 0) throw std::invalid_argument("MpcConfig: barrier_weight must be nonnegative");
  if (rear_critical_gap < 0 || rear_critical_gap > d_safe)
    throw std::invalid_argument("MpcConfig: rear_critical_gap must lie in [0, d_safe]");
  if (a_min >= a_max) throw std::invalid_argument("MpcConfig: control bounds inverted");
  if (seed_levels < 2) throw std::invalid_argument("MpcConfig: seed_levels must be at least 2");
  if (sweeps < 1) throw std::invalid_argument("MpcConfig: sweeps must be at least 1");
}

MpcState mpc_state_from_observation(const sim::Observation& obs, LaneRole role, double jerk) {
  MpcState x;
  x.v_ego = obs.v_ego;
  x.a_ego = obs.a_ego;
  x.jerk = jerk;
  if (role == LaneRole::current) {
    x.d_p = obs.d_p;
    x.d_f = obs.d_f;
    x.dv_p = obs.v_p - obs.v_ego;
    x.dv_f = obs.v_ego - obs.v_f;
  } else {
    x.d_p = obs.d_tp;
    x.d_f = obs.d_tf;
    x.dv_p = obs.v_tp - obs.v_ego;
    x.dv_f = obs.v_ego - obs.v_tf;
  }
  return x;
}

std::vector<MpcState> predict(const MpcState& x0, std::span<const double> u,
                              const MpcConfig& cfg) {
  if (static_cast<int>(u.size()) != cfg.horizon)
    throw std::invalid_argument("predict: control sequence length != horizon");
  std::vector<MpcState> traj;
  traj.reserve(u.size() + 1);
  traj.push_back(x0);

  if (cfg.literal_matrix) {
    for (double uk : u) {
      const MpcState& x = traj.back();
      MpcState n;
      n.d_p = x.d_p - cfg.ts * x.v_ego + cfg.ts * x.dv_p;
      n.d_f = x.d_f + cfg.ts * x.v_ego - cfg.ts * x.dv_f;
      n.v_ego = x.v_ego + cfg.ts * x.a_ego;
      n.dv_p = x.dv_p;
      n.dv_f = x.dv_f;
      n.a_ego = uk;
      n.jerk = -x.a_ego / cfg.ts + uk / cfg.ts;
      traj.push_back(n);
    }
    return traj;
  }

  // Neighbor speeds are frozen at their time-0 values.
  const double v_p = x0.v_ego + x0.dv_p;
  const double v_f = x0.v_ego - x0.dv_f;
  for (double uk : u) {
    const MpcState& x = traj.back();
    MpcState n;
    n.d_p = x.d_p + cfg.ts * x.dv_p;
    n.d_f = x.d_f + cfg.ts * x.dv_f;
    n.v_ego = x.v_ego + cfg.ts * uk;
    n.dv_p = v_p - n.v_ego;
    n.dv_f = n.v_ego - v_f;
    n.a_ego = uk;
    n.jerk = (uk - x.a_ego) / cfg.ts;
    traj.push_back(n);
  }
  return traj;
}

double horizon_cost(std::span<const MpcState> traj, LaneRole role, const MpcConfig& cfg) {
  if (traj.size() < 2) throw std::invalid_argument("horizon_cost: trajectory too short");
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const MpcState& x = traj[k];
    // The jerk term is charged per control change (|jerk| * Ts = |delta a|):
    // at this horizon an unscaled m/s^3 charge swamps every in-horizon
    // speed or spacing saving and freezes the controller.
    double stage = cfg.w1 * sim::gap_shortfall(x.d_p, cfg.d_safe) +
                   cfg.w3 * std::abs(x.v_ego - cfg.v_safe) +
                   cfg.w4 * cfg.ts * std::abs(x.jerk);
    const double front = sim::gap_shortfall(x.d_p, cfg.d_safe);
    stage += cfg.barrier_weight * front * front;
    if (role == LaneRole::target) {
      stage += cfg.w2 * sim::gap_shortfall(x.d_f, cfg.d_safe);
      const double rear = sim::gap_shortfall(x.d_f, cfg.rear_critical_gap);
      stage += cfg.barrier_weight * rear * rear;
    }
    sum += stage;
  }
  return sum / static_cast<double>(traj.size() - 1);
}

namespace {

double cost_of(const MpcState& x0, std::span<const double> u, LaneRole role,
               const MpcConfig& cfg) {
  const auto traj = predict(x0, u, cfg);
  return horizon_cost(traj, role, cfg);
}

}  // namespace

MpcSolution solve(const MpcState& x0, LaneRole role, const MpcConfig& cfg,
                  std::vector<double>* sweep_costs) {
  cfg.validate();
  const int n = cfg.horizon;

  // Seed: best constant sequence over an even grid of the control range.
  std::vector<double> u(n, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (int level = 0; level < cfg.seed_levels; ++level) {
    const double c = cfg.a_min + (cfg.a_max - cfg.a_min) * static_cast<double>(level) /
                                     static_cast<double>(cfg.seed_levels - 1);
    std::vector<double> cand(n, c);
    const double j = cost_of(x0, cand, role, cfg);
    if (j < best) {
      best = j;
      u = std::move(cand);
    }
  }

  // Cyclic coordinate descent with a shrinking step. Single-coordinate moves
  // alone stall on this cost: the jerk term couples consecutive controls, so
  // lowering one u_i trades jerk at one boundary for jerk at the next. Suffix
  // moves (shifting u_i..u_{N-1} together) cross those ridges.
  double step = cfg.init_step;
  std::vector<double> cand(n);
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    bool improved = false;
    auto try_candidate = [&]() {
      const double j = cost_of(x0, cand, role, cfg);
      if (j < best) {
        best = j;
        u = cand;
        improved = true;
      }
    };
    for (int i = 0; i < n; ++i) {
      for (double dir : {+1.0, -1.0}) {
        cand = u;
        cand[i] = std::clamp(u[i] + dir * step, cfg.a_min, cfg.a_max);
        if (cand[i] == u[i]) continue;
        try_candidate();
      }
    }
    for (int i = 0; i < n; ++i) {
      for (double dir : {+1.0, -1.0}) {
        cand = u;
        bool moved = false;
        for (int k = i; k < n; ++k) {
          cand[k] = std::clamp(u[k] + dir * step, cfg.a_min, cfg.a_max);
          moved |= cand[k] != u[k];
        }
        if (!moved) continue;
        try_candidate();
      }
    }
    if (sweep_costs) sweep_costs->push_back(best);
    if (!improved) {
      step *= 0.5;
      if (step < cfg.tol) break;
    }
  }

  MpcSolution sol;
  sol.u = std::move(u);
  sol.cost = best;
  sol.first_control = sol.u.front();
  return sol;
}

bool tlacc_switch_rule(double j_current, double j_target, const MpcConfig& cfg) {
  return (1.0 + cfg.k_p) * j_target <= j_current;
}

TlaccDecision tlacc_decide(const sim::Observation& obs, double jerk, const MpcConfig& cfg,
                           TlaccLog* log) {
  const MpcState x_cur = mpc_state_from_observation(obs, LaneRole::current, jerk);
  const MpcSolution cur = solve(x_cur, LaneRole::current, cfg);
  if (log) {
    log->j_current = cur.cost;
    log->j_target.reset();
  }
  if (cur.cost <= cfg.j_th) return {0, cur.first_control};

  const MpcState x_tgt = mpc_state_from_observation(obs, LaneRole::target, jerk);
  const MpcSolution tgt = solve(x_tgt, LaneRole::target, cfg);
  if (log) log->j_target = tgt.cost;
  if (tlacc_switch_rule(cur.cost, tgt.cost, cfg)) return {1, tgt.first_control};
  return {0, cur.first_control};
}

}  // namespace lcbench::mpc
