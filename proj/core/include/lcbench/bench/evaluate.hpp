#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lcbench/mpc/mpc.hpp"
#include "lcbench/pasac/types.hpp"
#include "lcbench/sim/types.hpp"

namespace lcbench::bench {

struct EpisodeMetrics {
  int episode = 0;
  std::uint64_t seed = 0;
  double episode_return = 0.0;
  double mean_speed = 0.0;
  int lane_changes = 0;
  bool collided = false;
  int steps = 0;
};

struct AggregateMetrics {
  int episodes = 0;
  double collision_rate = 0.0;
  double mean_speed = 0.0;
  long lane_changes_total = 0;
  double mean_return = 0.0;
  double reward_diff_pct = 0.0;  // vs. a baseline; see reward_difference
  bool has_reward_diff = false;
};

// 100 * (|r_base| - |r_test|) / |r_base|; rejects a zero baseline.
double reward_difference(double r_test, double r_base);

struct PasacController {
  const pasac::NetworkBundle* bundle = nullptr;
};
struct TlaccController {
  mpc::MpcConfig cfg;
};
using Controller = std::variant<PasacController, TlaccController>;

struct EvaluateOptions {
  int episodes = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string trace_dir;  // when set, per-step trace CSVs are written here
  bool tlacc_log = false; // with trace_dir, also write per-decision cost logs
};

struct EvaluateResult {
  AggregateMetrics aggregate;
  std::vector<EpisodeMetrics> rows;
};

// Runs episodes with per-episode seeds derived from the master seed; both
// controller kinds are scored with the identical reward. Episode seeds do
// not depend on the controller, so matched comparisons share traffic.
EvaluateResult evaluate(const Controller& controller, const sim::SimConfig& sim_cfg,
                        const EvaluateOptions& opts);

struct SweepRow {
  std::string controller;  // "pasac" | "mpc"
  double density = 0.0;
  AggregateMetrics metrics;
};

// Both controllers at each density, on shared per-density episode seeds; the
// reward difference column is relative to the MPC row of the same density.
std::vector<SweepRow> sweep(const pasac::NetworkBundle& bundle, const sim::SimConfig& base_cfg,
                            const std::vector<double>& densities, const EvaluateOptions& opts);

void write_episode_csv(const std::string& path, const std::vector<EpisodeMetrics>& rows);
void write_aggregate_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace lcbench::bench
