// lcbench: train, evaluate and compare the two lane-change controllers.
//
// Subcommands:
//   train    train the hybrid-action agent, writing checkpoint + curve CSV
//   eval     run one controller for N episodes at a given traffic density
//   compare  evaluate both controllers on identical episode seeds
//   sweep    compare across a list of traffic densities
//   export   turn per-step traces into time-series CSVs and SVG charts
//
// Every run writes a manifest (config snapshot, seed, output hashes); rerunning
// with the same config and seed reproduces the outputs byte for byte.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <thread>

#include "lcbench/bench/evaluate.hpp"
#include "lcbench/bench/traces.hpp"
#include "lcbench/common/hash.hpp"
#include "lcbench/config/manifest.hpp"
#include "lcbench/config/run_config.hpp"
#include "lcbench/nn/checkpoint.hpp"
#include "lcbench/pasac/train.hpp"
#include "lcbench/version.hpp"

namespace {

using lcbench::config::ConfigError;
using lcbench::config::RunConfig;

// Exit codes: 0 success, 2 usage/config key errors, 3 unreadable config file,
// 4 missing or corrupt checkpoint, 1 anything else.
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitCheckpoint = 4;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs from --set
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = RunConfig::load_file(args.config_path);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + kv + "' is not of the form key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

std::map<std::string, std::string> hash_outputs(const std::vector<std::string>& paths) {
  std::map<std::string, std::string> out;
  for (const auto& p : paths)
    out[std::filesystem::path(p).filename().string()] =
        lcbench::common::hash_hex(lcbench::common::fnv1a64_file(p));
  return out;
}

int effective_jobs(int cfg_jobs) {
  if (cfg_jobs > 0) return cfg_jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

lcbench::pasac::NetworkBundle load_bundle_or_die(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw lcbench::nn::CheckpointError("checkpoint not found: " + path);
  return lcbench::pasac::NetworkBundle::load(path);
}

int cmd_train(const CommonArgs& args, long steps_override, double density_override) {
  RunConfig cfg = load_config(args);
  if (steps_override > 0) cfg.pasac.total_steps = steps_override;
  if (density_override >= 0) cfg.sim.flow_density = density_override;
  cfg.validate();
  std::filesystem::create_directories(args.out_dir);

  const std::string ckpt = args.out_dir + "/checkpoint.lcb";
  const std::string curve = args.out_dir + "/curve.csv";

  lcbench::common::Rng init_rng(lcbench::common::derive_seed(args.seed, 0xC0FFEE));
  auto bundle = lcbench::pasac::NetworkBundle::make(cfg.pasac, init_rng);
  const auto result = lcbench::pasac::train(cfg.sim, cfg.pasac, bundle, args.seed, curve,
                                            args.out_dir + "/abort_checkpoint.lcb");
  bundle.save(ckpt);

  lcbench::config::write_manifest(args.out_dir + "/manifest.json", "train", cfg, args.seed,
                                  hash_outputs({ckpt, curve}));
  std::printf("train: %ld steps, %d episodes, checkpoint %s\n", result.env_steps,
              result.episodes, ckpt.c_str());
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& controller,
             const std::string& checkpoint, double density_override, int episodes_override,
             bool traces) {
  RunConfig cfg = load_config(args);
  if (density_override >= 0) cfg.sim.flow_density = density_override;
  if (episodes_override > 0) cfg.episodes = episodes_override;
  cfg.validate();
  std::filesystem::create_directories(args.out_dir);

  lcbench::bench::EvaluateOptions opts;
  opts.episodes = cfg.episodes;
  opts.seed = args.seed;
  opts.jobs = effective_jobs(cfg.jobs);
  if (traces) {
    opts.trace_dir = args.out_dir + "/traces";
    opts.tlacc_log = true;
  }

  lcbench::pasac::NetworkBundle bundle;
  lcbench::bench::Controller ctl;
  if (controller == "pasac") {
    if (checkpoint.empty())
      throw lcbench::nn::CheckpointError("--controller pasac requires --checkpoint");
    bundle = load_bundle_or_die(checkpoint);
    ctl = lcbench::bench::PasacController{&bundle};
  } else if (controller == "mpc") {
    ctl = lcbench::bench::TlaccController{cfg.mpc_config()};
  } else {
    std::fprintf(stderr, "lcbench: unknown controller '%s' (expected pasac|mpc)\n",
                 controller.c_str());
    return kExitUsage;
  }

  const auto result = lcbench::bench::evaluate(ctl, cfg.sim, opts);
  const std::string episodes_csv = args.out_dir + "/episodes.csv";
  lcbench::bench::write_episode_csv(episodes_csv, result.rows);
  const std::string agg_csv = args.out_dir + "/aggregate.csv";
  lcbench::bench::write_aggregate_csv(
      agg_csv, {{controller, cfg.sim.flow_density, result.aggregate}});

  lcbench::config::write_manifest(args.out_dir + "/manifest.json", "eval", cfg, args.seed,
                                  hash_outputs({episodes_csv, agg_csv}));
  std::printf("eval %s: %d episodes, collision_rate %.4f, mean_speed %.3f, mean_return %.3f\n",
              controller.c_str(), result.aggregate.episodes, result.aggregate.collision_rate,
              result.aggregate.mean_speed, result.aggregate.mean_return);
  return 0;
}

int cmd_compare(const CommonArgs& args, const std::string& checkpoint, double density_override,
                int episodes_override) {
  RunConfig cfg = load_config(args);
  if (density_override >= 0) cfg.sim.flow_density = density_override;
  if (episodes_override > 0) cfg.episodes = episodes_override;
  cfg.validate();
  std::filesystem::create_directories(args.out_dir);

  const auto bundle = load_bundle_or_die(checkpoint);
  lcbench::bench::EvaluateOptions opts;
  opts.episodes = cfg.episodes;
  opts.seed = args.seed;
  opts.jobs = effective_jobs(cfg.jobs);

  const auto rows = lcbench::bench::sweep(bundle, cfg.sim, {cfg.sim.flow_density}, opts);
  const std::string compare_csv = args.out_dir + "/compare.csv";
  lcbench::bench::write_aggregate_csv(compare_csv, rows);
  lcbench::config::write_manifest(args.out_dir + "/manifest.json", "compare", cfg, args.seed,
                                  hash_outputs({compare_csv}));
  for (const auto& r : rows)
    std::printf("%-6s density %.2f: collision_rate %.4f mean_speed %.3f mean_return %.3f\n",
                r.controller.c_str(), r.density, r.metrics.collision_rate,
                r.metrics.mean_speed, r.metrics.mean_return);
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& checkpoint,
              const std::string& densities_csv, int episodes_override) {
  RunConfig cfg = load_config(args);
  if (!densities_csv.empty()) cfg.set("densities", densities_csv);
  if (episodes_override > 0) cfg.episodes = episodes_override;
  cfg.validate();
  std::filesystem::create_directories(args.out_dir);

  const auto bundle = load_bundle_or_die(checkpoint);
  lcbench::bench::EvaluateOptions opts;
  opts.episodes = cfg.episodes;
  opts.seed = args.seed;
  opts.jobs = effective_jobs(cfg.jobs);

  const auto rows = lcbench::bench::sweep(bundle, cfg.sim, cfg.densities, opts);
  const std::string sweep_csv = args.out_dir + "/sweep.csv";
  lcbench::bench::write_aggregate_csv(sweep_csv, rows);
  lcbench::config::write_manifest(args.out_dir + "/manifest.json", "sweep", cfg, args.seed,
                                  hash_outputs({sweep_csv}));
  std::printf("sweep: %zu rows -> %s\n", rows.size(), sweep_csv.c_str());
  return 0;
}

int cmd_export(const CommonArgs& args, const std::string& traces_dir) {
  RunConfig cfg = load_config(args);
  cfg.validate();
  std::filesystem::create_directories(args.out_dir);
  const auto written =
      lcbench::bench::export_traces(traces_dir, args.out_dir, cfg.sim.lane_width);
  std::map<std::string, std::string> hashes;
  lcbench::config::write_manifest(args.out_dir + "/manifest.json", "export", cfg, args.seed,
                                  hash_outputs(written));
  std::printf("export: %zu files -> %s\n", written.size(), args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-lane lane-change benchmark: hybrid-action SAC vs receding-horizon MPC"};
  app.set_version_flag("--version", lcbench::kVersion);
  app.require_subcommand(1);

  CommonArgs common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "config file (key = value lines)");
    sub->add_option("--set", common.overrides, "config override key=value (repeatable)");
    sub->add_option("--seed", common.seed, "master seed");
    sub->add_option("--out", common.out_dir, "output directory");
  };

  auto* train = app.add_subcommand("train", "train the hybrid-action agent");
  long train_steps = 0;
  double train_density = -1;
  add_common(train);
  train->add_option("--steps", train_steps, "override total environment steps");
  train->add_option("--density", train_density, "override traffic density (veh/s)");

  auto* eval = app.add_subcommand("eval", "evaluate one controller");
  std::string eval_controller = "mpc", eval_checkpoint;
  double eval_density = -1;
  int eval_episodes = 0;
  bool eval_traces = false;
  add_common(eval);
  eval->add_option("--controller", eval_controller, "pasac | mpc")->required();
  eval->add_option("--checkpoint", eval_checkpoint, "agent checkpoint (pasac only)");
  eval->add_option("--density", eval_density, "traffic density (veh/s)");
  eval->add_option("--episodes", eval_episodes, "episode count");
  eval->add_flag("--traces", eval_traces, "write per-step trace CSVs");

  auto* compare = app.add_subcommand("compare", "both controllers, identical episode seeds");
  std::string compare_ckpt;
  double compare_density = -1;
  int compare_episodes = 0;
  add_common(compare);
  compare->add_option("--pasac", compare_ckpt, "agent checkpoint")->required();
  compare->add_option("--density", compare_density, "traffic density (veh/s)");
  compare->add_option("--episodes", compare_episodes, "episode count");

  auto* sweep = app.add_subcommand("sweep", "compare across traffic densities");
  std::string sweep_ckpt, sweep_densities;
  int sweep_episodes = 0;
  add_common(sweep);
  sweep->add_option("--pasac", sweep_ckpt, "agent checkpoint")->required();
  sweep->add_option("--densities", sweep_densities, "comma-separated densities");
  sweep->add_option("--episodes", sweep_episodes, "episode count");

  auto* exp = app.add_subcommand("export", "render trace CSVs into series + charts");
  std::string export_traces_dir;
  add_common(exp);
  exp->add_option("--traces", export_traces_dir, "directory with episode_*.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(common, train_steps, train_density);
    if (eval->parsed())
      return cmd_eval(common, eval_controller, eval_checkpoint, eval_density, eval_episodes,
                      eval_traces);
    if (compare->parsed())
      return cmd_compare(common, compare_ckpt, compare_density, compare_episodes);
    if (sweep->parsed()) return cmd_sweep(common, sweep_ckpt, sweep_densities, sweep_episodes);
    if (exp->parsed()) return cmd_export(common, export_traces_dir);
    std::fprintf(stderr, "lcbench: no subcommand\n");
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "lcbench: %s\n", e.what());
    // unreadable file vs bad key/value
    return std::string(e.what()).find("cannot read config file") != std::string::npos
               ? kExitConfig
               : kExitUsage;
  } catch (const lcbench::nn::CheckpointError& e) {
    std::fprintf(stderr, "lcbench: %s\n", e.what());
    return kExitCheckpoint;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lcbench: %s\n", e.what());
    return 1;
  }
}
