#include "lcbench/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lcbench/sim/idm.hpp"
#include "lcbench/sim/reward.hpp"

namespace lcbench::sim {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SimConfig: ") + field + " " + what);
}

}  // namespace

void SimConfig::validate() const {
  require(road_length > 0, "road_length", "must be positive");
  require(lane_count == 2, "lane_count", "must be 2");
  require(lane_width > 0, "lane_width", "must be positive");
  require(dt > 0, "dt", "must be positive");
  require(a_min < 0 && 0 < a_max, "a_min/a_max", "must straddle zero");
  require(v_safe > 0, "v_safe", "must be positive");
  require(d_safe > vehicle_length, "d_safe", "must exceed vehicle_length");
  require(w0 >= 0 && w1 >= 0 && w2 >= 0 && w3 >= 0 && w4 >= 0, "weights", "must be nonnegative");
  require(flow_density >= 0, "flow_density", "must be nonnegative");
  require(flow_density * dt < 1, "flow_density", "times dt must stay below 1");
  require(sensing_range > 0, "sensing_range", "must be positive");
  require(vehicle_length > 0, "vehicle_length", "must be positive");
  require(ego_init_speed >= 0, "ego_init_speed", "must be nonnegative");
  require(leader_init_speed >= 0, "leader_init_speed", "must be nonnegative");
  require(spawn_buffer >= 0, "spawn_buffer", "must be nonnegative");
  require(max_steps > 0, "max_steps", "must be positive");
}

bool detect_collision(const std::vector<VehicleState>& vehicles, const SimConfig& cfg,
                      bool* ego_involved) {
  if (ego_involved) *ego_involved = false;
  bool any = false;
  // Per lane, sort by position and inspect adjacent pairs.
  std::vector<const VehicleState*> lane_vs;
  for (int lane = 0; lane < cfg.lane_count; ++lane) {
    lane_vs.clear();
    for (const auto& v : vehicles)
      if (v.lane == lane) lane_vs.push_back(&v);
    std::sort(lane_vs.begin(), lane_vs.end(),
              [](const VehicleState* a, const VehicleState* b) { return a->s < b->s; });
    for (std::size_t i = 0; i + 1 < lane_vs.size(); ++i) {
      const double gap = lane_vs[i + 1]->s - lane_vs[i]->s - cfg.vehicle_length;
      if (gap < 0.0) {
        any = true;
        if (ego_involved && (lane_vs[i]->is_ego || lane_vs[i + 1]->is_ego)) *ego_involved = true;
      }
    }
  }
  return any;
}

Simulation::Simulation(const SimConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  reset(seed);
}

Simulation Simulation::from_vehicles(const SimConfig& cfg, std::vector<VehicleState> vehicles,
                                     std::uint64_t seed) {
  Simulation s(cfg, seed);
  std::size_t ego_at = vehicles.size();
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].is_ego) {
      if (ego_at != vehicles.size())
        throw std::invalid_argument("from_vehicles: more than one ego");
      ego_at = i;
    }
  }
  if (ego_at == vehicles.size()) throw std::invalid_argument("from_vehicles: no ego vehicle");
  std::swap(vehicles[0], vehicles[ego_at]);
  s.vehicles_ = std::move(vehicles);
  s.ego_index_ = 0;
  s.next_id_ = 0;
  for (const auto& v : s.vehicles_) s.next_id_ = std::max(s.next_id_, v.id + 1);
  s.step_count_ = 0;
  s.collided_ = s.reached_end_ = s.truncated_ = false;
  return s;
}

void Simulation::reset(std::uint64_t seed) {
  rng_ = common::Rng(seed);
  vehicles_.clear();
  next_id_ = 0;
  step_count_ = 0;
  collided_ = reached_end_ = truncated_ = false;

  VehicleState ego;
  ego.id = next_id_++;
  ego.lane = 0;
  ego.s = cfg_.spawn_buffer;
  ego.v = cfg_.ego_init_speed;
  ego.is_ego = true;
  ego.desired_speed = cfg_.ego_init_speed;
  vehicles_.push_back(ego);
  ego_index_ = 0;

  VehicleState leader;
  leader.id = next_id_++;
  leader.lane = 0;
  leader.s = ego.s + cfg_.vehicle_length + cfg_.d_safe;
  leader.v = cfg_.leader_init_speed;
  leader.desired_speed = cfg_.leader_init_speed;
  vehicles_.push_back(leader);

  if (cfg_.flow_density > 0.0) seed_initial_traffic();
}

void Simulation::seed_initial_traffic() {
  // Spatial Poisson process per lane at the steady-state linear density of
  // the arrival flow, keeping a spawn_buffer bubble around the ego and its
  // leader and at least d_safe between consecutive seeds.
  const double mean_speed = 0.9 * cfg_.v_safe;
  const double rate = cfg_.flow_density / (cfg_.lane_count * mean_speed);  // vehicles per m
  const double ego_s = vehicles_[0].s;
  const double leader_s = vehicles_[1].s;
  for (int lane = 0; lane < cfg_.lane_count; ++lane) {
    double s = 0.0;
    double last_placed = -1e300;
    while (true) {
      double u = rng_.uniform01();
      if (u < 1e-300) u = 1e-300;
      s += -std::log(u) / rate;
      if (s > cfg_.road_length) break;
      if (std::abs(s - ego_s) < cfg_.spawn_buffer) continue;
      if (std::abs(s - leader_s) < cfg_.spawn_buffer) continue;
      if (s - last_placed < cfg_.vehicle_length + cfg_.d_safe) continue;
      VehicleState v;
      v.id = next_id_++;
      v.lane = lane;
      v.s = s;
      v.v = rng_.uniform(0.8 * cfg_.v_safe, cfg_.v_safe);
      v.desired_speed = v.v;
      vehicles_.push_back(v);
      last_placed = s;
    }
  }
}

const VehicleState* Simulation::neighbor_ahead(int lane, double s) const {
  const VehicleState* best = nullptr;
  for (const auto& v : vehicles_) {
    if (v.lane != lane || v.s <= s || v.is_ego) continue;
    if (!best || v.s < best->s) best = &v;
  }
  return best;
}

const VehicleState* Simulation::neighbor_behind(int lane, double s) const {
  const VehicleState* best = nullptr;
  for (const auto& v : vehicles_) {
    if (v.lane != lane || v.s >= s || v.is_ego) continue;
    if (!best || v.s > best->s) best = &v;
  }
  return best;
}

Observation Simulation::observe() const {
  const VehicleState& ego = vehicles_[ego_index_];
  const int target = 1 - ego.lane;
  Observation obs;
  obs.v_ego = ego.v;
  obs.a_ego = ego.a;

  auto fill = [&](const VehicleState* nb, bool ahead, double& gap_out, double& v_out) {
    if (nb) {
      const double gap = ahead ? nb->s - ego.s - cfg_.vehicle_length
                               : ego.s - nb->s - cfg_.vehicle_length;
      if (gap <= cfg_.sensing_range) {
        gap_out = std::clamp(gap, 0.0, cfg_.sensing_range);
        v_out = nb->v;
        return;
      }
    }
    gap_out = cfg_.sensing_range;
    v_out = cfg_.v_safe;
  };

  fill(neighbor_ahead(ego.lane, ego.s), true, obs.d_p, obs.v_p);
  fill(neighbor_behind(ego.lane, ego.s), false, obs.d_f, obs.v_f);
  fill(neighbor_ahead(target, ego.s), true, obs.d_tp, obs.v_tp);
  fill(neighbor_behind(target, ego.s), false, obs.d_tf, obs.v_tf);
  return obs;
}

void Simulation::spawn_arrival() {
  if (cfg_.flow_density <= 0.0) return;
  const double p = cfg_.flow_density * cfg_.dt;
  if (rng_.uniform01() >= p) return;
  const int lane = rng_.uniform01() < 0.5 ? 0 : 1;
  const double speed = rng_.uniform(0.8 * cfg_.v_safe, cfg_.v_safe);
  // Entry gap guard: discard the arrival when the nearest vehicle ahead in
  // the chosen lane leaves less than d_safe of clear road.
  const VehicleState* ahead = nullptr;
  for (const auto& v : vehicles_) {
    if (v.lane != lane || v.s < 0.0) continue;
    if (!ahead || v.s < ahead->s) ahead = &v;
  }
  if (ahead && ahead->s - 0.0 - cfg_.vehicle_length <= cfg_.d_safe) return;
  VehicleState v;
  v.id = next_id_++;
  v.lane = lane;
  v.s = 0.0;
  v.v = speed;
  v.desired_speed = speed;
  vehicles_.push_back(v);
}

StepResult Simulation::step(const HybridAction& action) {
  if (done()) throw std::logic_error("Simulation::step called on a finished episode");

  VehicleState& ego = vehicles_[ego_index_];
  const Observation prev_obs = observe();
  const int prev_lane = ego.lane;

  // 1. Discrete command: the lane change is instantaneous.
  if (action.discrete == 1) ego.lane = 1 - ego.lane;

  // 2. Accelerations: ego from the clamped command, traffic from IDM against
  //    the post-change configuration, decided synchronously.
  std::vector<double> accel(vehicles_.size());
  accel[ego_index_] = std::clamp(action.a_cont, cfg_.a_min, cfg_.a_max);
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (i == ego_index_) continue;
    const VehicleState& f = vehicles_[i];
    const VehicleState* leader = nullptr;
    for (const auto& v : vehicles_) {
      if (&v == &f || v.lane != f.lane || v.s <= f.s) continue;
      if (!leader || v.s < leader->s) leader = &v;
    }
    accel[i] = npc_accel(f, leader, cfg_);
  }

  // 3. Constant-acceleration kinematics with the nonnegative-speed clamp.
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    VehicleState& v = vehicles_[i];
    double a = accel[i];
    double v_next = v.v + a * cfg_.dt;
    if (v_next < 0.0) {
      v_next = 0.0;
      a = (v_next - v.v) / cfg_.dt;  // clamping-consistent value
    }
    v.s += v.v * cfg_.dt + 0.5 * a * cfg_.dt * cfg_.dt;
    v.a_prev = v.a;
    v.a = a;
    v.v = v_next;
  }

  // 4. Traffic that passed the end of the road leaves the simulation.
  std::erase_if(vehicles_, [&](const VehicleState& v) {
    return !v.is_ego && v.s > cfg_.road_length;
  });
  ego_index_ = 0;

  // 5. Arrivals enter at the road start.
  spawn_arrival();

  ++step_count_;

  const VehicleState& ego_now = vehicles_[ego_index_];
  bool ego_hit = false;
  detect_collision(vehicles_, cfg_, &ego_hit);
  if (ego_now.s > cfg_.road_length) {
    reached_end_ = true;
  } else if (ego_hit) {
    collided_ = true;
  } else if (step_count_ >= cfg_.max_steps) {
    truncated_ = true;
  }

  StepResult result;
  result.observation = observe();
  result.collided = collided_;
  result.reached_end = reached_end_;
  result.truncated = truncated_;
  result.reward = compute_reward(prev_obs, prev_lane, result.observation, ego_now.lane,
                                 ego_jerk(), collided_, cfg_);
  return result;
}

bool Simulation::same_state(const Simulation& other) const {
  if (vehicles_.size() != other.vehicles_.size()) return false;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    const auto& a = vehicles_[i];
    const auto& b = other.vehicles_[i];
    if (a.id != b.id || a.lane != b.lane || a.s != b.s || a.v != b.v || a.a != b.a ||
        a.a_prev != b.a_prev || a.is_ego != b.is_ego || a.desired_speed != b.desired_speed)
      return false;
  }
  return step_count_ == other.step_count_ && collided_ == other.collided_ &&
         reached_end_ == other.reached_end_ && truncated_ == other.truncated_ &&
         rng_.state() == other.rng_.state();
}

}  // namespace lcbench::sim
