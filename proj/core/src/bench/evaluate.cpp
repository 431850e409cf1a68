#include "lcbench/bench/evaluate.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <thread>

#include "lcbench/common/csv.hpp"
#include "lcbench/pasac/agent.hpp"
#include "lcbench/sim/simulation.hpp"

namespace lcbench::bench {

double reward_difference(double r_test, double r_base) {
  if (r_base == 0.0) throw std::invalid_argument("reward_difference: zero baseline");
  return 100.0 * (std::abs(r_base) - std::abs(r_test)) / std::abs(r_base);
}

namespace {

EpisodeMetrics run_episode(const Controller& controller, const sim::SimConfig& cfg,
                           int episode, std::uint64_t episode_seed,
                           const std::string& trace_dir, bool tlacc_log) {
  sim::Simulation env(cfg, episode_seed);
  const auto bounds = pasac::action_bounds(cfg.a_min, cfg.a_max);

  std::unique_ptr<common::CsvWriter> trace;
  std::unique_ptr<common::CsvWriter> decisions;
  if (!trace_dir.empty()) {
    char name[64];
    std::snprintf(name, sizeof(name), "/episode_%04d.csv", episode);
    trace = std::make_unique<common::CsvWriter>(
        trace_dir + name,
        std::vector<std::string>{"step", "ego_lane", "ego_s", "ego_v", "ego_a", "jerk", "d_p",
                                 "reward_total"});
    if (tlacc_log && std::holds_alternative<TlaccController>(controller)) {
      std::snprintf(name, sizeof(name), "/tlacc_%04d.csv", episode);
      decisions = std::make_unique<common::CsvWriter>(
          trace_dir + name,
          std::vector<std::string>{"step", "J_c", "J_target", "lane_switch", "u_d"});
    }
  }

  EpisodeMetrics m;
  m.episode = episode;
  m.seed = episode_seed;

  double speed_sum = 0.0;
  while (!env.done()) {
    const sim::Observation obs = env.observe();
    const int lane_before = env.ego().lane;

    HybridAction action;
    if (const auto* pc = std::get_if<PasacController>(&controller)) {
      action = pasac::select_action(*pc->bundle,
                                    pasac::normalize_obs(obs, cfg.sensing_range), bounds,
                                    /*deterministic=*/true, nullptr);
    } else {
      const auto& tc = std::get<TlaccController>(controller);
      mpc::TlaccLog log;
      const mpc::TlaccDecision d = mpc::tlacc_decide(obs, env.ego_jerk(), tc.cfg,
                                                     decisions ? &log : nullptr);
      action = d.lane_switch ? HybridAction::change(d.u_d) : HybridAction::stay(d.u_d);
      if (decisions) {
        decisions->begin_row();
        decisions->field(env.step_count());
        decisions->field(log.j_current);
        if (log.j_target)
          decisions->field(*log.j_target);
        else
          decisions->blank_field();
        decisions->field(d.lane_switch);
        decisions->field(d.u_d);
        decisions->end_row();
      }
    }

    const sim::StepResult sr = env.step(action);
    m.episode_return += sr.reward.total;
    ++m.steps;
    speed_sum += env.ego().v;
    if (env.ego().lane != lane_before) ++m.lane_changes;
    m.collided = sr.collided;

    if (trace) {
      trace->begin_row();
      trace->field(m.steps - 1);
      trace->field(env.ego().lane);
      trace->field(env.ego().s);
      trace->field(env.ego().v);
      trace->field(env.ego().a);
      trace->field(env.ego_jerk());
      trace->field(sr.observation.d_p);
      trace->field(sr.reward.total);
      trace->end_row();
    }
  }
  m.mean_speed = m.steps > 0 ? speed_sum / m.steps : 0.0;
  return m;
}

AggregateMetrics aggregate_rows(const std::vector<EpisodeMetrics>& rows) {
  AggregateMetrics a;
  a.episodes = static_cast<int>(rows.size());
  if (rows.empty()) return a;
  long collisions = 0;
  double speed_sum = 0.0, return_sum = 0.0;
  for (const auto& r : rows) {
    collisions += r.collided ? 1 : 0;
    speed_sum += r.mean_speed;
    return_sum += r.episode_return;
    a.lane_changes_total += r.lane_changes;
  }
  a.collision_rate = static_cast<double>(collisions) / a.episodes;
  a.mean_speed = speed_sum / a.episodes;
  a.mean_return = return_sum / a.episodes;
  return a;
}

}  // namespace

EvaluateResult evaluate(const Controller& controller, const sim::SimConfig& sim_cfg,
                        const EvaluateOptions& opts) {
  sim_cfg.validate();
  if (opts.episodes <= 0) throw std::invalid_argument("evaluate: episodes must be positive");
  if (!opts.trace_dir.empty()) std::filesystem::create_directories(opts.trace_dir);

  std::vector<EpisodeMetrics> rows(static_cast<std::size_t>(opts.episodes));
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    for (int e = 0; e < opts.episodes; ++e)
      rows[e] = run_episode(controller, sim_cfg, e, common::derive_seed(opts.seed, e),
                            opts.trace_dir, opts.tlacc_log);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const int e = next.fetch_add(1);
          if (e >= opts.episodes) return;
          rows[e] = run_episode(controller, sim_cfg, e, common::derive_seed(opts.seed, e),
                                opts.trace_dir, opts.tlacc_log);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  EvaluateResult result;
  result.rows = std::move(rows);
  result.aggregate = aggregate_rows(result.rows);
  return result;
}

std::vector<SweepRow> sweep(const pasac::NetworkBundle& bundle, const sim::SimConfig& base_cfg,
                            const std::vector<double>& densities, const EvaluateOptions& opts) {
  std::vector<SweepRow> rows;
  for (double density : densities) {
    sim::SimConfig cfg = base_cfg;
    cfg.flow_density = density;
    EvaluateOptions eo = opts;
    eo.trace_dir.clear();

    const EvaluateResult mpc_r = evaluate(TlaccController{mpc::MpcConfig::from_sim(cfg)}, cfg, eo);
    const EvaluateResult pasac_r = evaluate(PasacController{&bundle}, cfg, eo);

    SweepRow pr{"pasac", density, pasac_r.aggregate};
    if (mpc_r.aggregate.mean_return != 0.0) {
      pr.metrics.reward_diff_pct =
          reward_difference(pasac_r.aggregate.mean_return, mpc_r.aggregate.mean_return);
      pr.metrics.has_reward_diff = true;
    }
    SweepRow mr{"mpc", density, mpc_r.aggregate};
    mr.metrics.reward_diff_pct = 0.0;
    mr.metrics.has_reward_diff = true;
    rows.push_back(pr);
    rows.push_back(mr);
  }
  return rows;
}

void write_episode_csv(const std::string& path, const std::vector<EpisodeMetrics>& rows) {
  common::CsvWriter csv(path, {"episode", "seed", "return", "mean_speed", "lane_changes",
                               "collided", "steps"});
  for (const auto& r : rows) {
    csv.begin_row();
    csv.field(r.episode);
    csv.field(std::to_string(r.seed));
    csv.field(r.episode_return);
    csv.field(r.mean_speed);
    csv.field(r.lane_changes);
    csv.field(r.collided);
    csv.field(r.steps);
    csv.end_row();
  }
}

void write_aggregate_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  common::CsvWriter csv(path, {"controller", "density", "episodes", "collision_rate",
                               "mean_speed", "lane_changes_total", "mean_return",
                               "reward_diff_pct"});
  for (const auto& r : rows) {
    csv.begin_row();
    csv.field(r.controller);
    csv.field(r.density);
    csv.field(r.metrics.episodes);
    csv.field(r.metrics.collision_rate);
    csv.field(r.metrics.mean_speed);
    csv.field(r.metrics.lane_changes_total);
    csv.field(r.metrics.mean_return);
    if (r.metrics.has_reward_diff)
      csv.field(r.metrics.reward_diff_pct);
    else
      csv.blank_field();
    csv.end_row();
  }
}

}  // namespace lcbench::bench
