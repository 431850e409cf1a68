#include "lcbench/pasac/train.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "lcbench/common/csv.hpp"
#include "lcbench/nn/adam.hpp"

namespace lcbench::pasac {

namespace {

Eigen::MatrixXd draw_noise(common::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd n(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) n(r, c) = rng.normal();
  return n;
}

}  // namespace

TrainResult train(const sim::SimConfig& sim_cfg, const PasacHyper& hyper, NetworkBundle& bundle,
                  std::uint64_t seed, const std::string& curve_csv_path,
                  const std::string& abort_checkpoint_path) {
  sim_cfg.validate();
  hyper.validate();

  common::Rng rng(common::derive_seed(seed, 0));
  ReplayBuffer buffer(static_cast<std::size_t>(hyper.buffer_capacity));
  const auto bounds = action_bounds(sim_cfg.a_min, sim_cfg.a_max);

  nn::Adam opt_q1 = nn::Adam::make(bundle.q1, hyper.critic_lr);
  nn::Adam opt_q2 = nn::Adam::make(bundle.q2, hyper.critic_lr);
  nn::Adam opt_v = nn::Adam::make(bundle.value, hyper.critic_lr);
  nn::Adam opt_pi = nn::Adam::make(bundle.policy, hyper.actor_lr);

  std::unique_ptr<common::CsvWriter> csv;
  if (!curve_csv_path.empty()) {
    csv = std::make_unique<common::CsvWriter>(
        curve_csv_path, std::vector<std::string>{"env_step", "episode_index", "episode_return",
                                                 "episode_length", "collided"});
  }

  TrainResult result;
  int episode = 0;
  sim::Simulation env(sim_cfg, common::derive_seed(seed, 1));
  double ep_return = 0.0;
  int ep_len = 0;

  auto check_finite = [&](double loss, const char* which) {
    if (std::isfinite(loss)) return;
    if (!abort_checkpoint_path.empty()) bundle.save(abort_checkpoint_path);
    throw std::runtime_error(std::string("train: non-finite ") + which + " loss at step " +
                             std::to_string(result.env_steps) +
                             (abort_checkpoint_path.empty()
                                  ? ""
                                  : "; diagnostic checkpoint at " + abort_checkpoint_path));
  };

  for (long t = 1; t <= hyper.total_steps; ++t) {
    const sim::Observation obs = env.observe();
    const HybridAction action =
        select_action(bundle, normalize_obs(obs, sim_cfg.sensing_range), bounds, false, &rng);
    const sim::StepResult sr = env.step(action);

    Transition tr;
    tr.obs = obs.as_array();
    tr.action = {action.a_cont, action.k_weights[0], action.k_weights[1]};
    tr.reward = sr.reward.total;
    tr.next_obs = sr.observation.as_array();
    tr.terminal = sr.collided;  // truncation and road end still bootstrap
    buffer.push(tr);

    ep_return += sr.reward.total;
    ++ep_len;
    result.env_steps = t;

    if (sr.done()) {
      EpisodeRecord rec{t, episode, ep_return, ep_len, sr.collided};
      result.curve.push_back(rec);
      if (csv) {
        csv->begin_row();
        csv->field(rec.env_step);
        csv->field(rec.episode_index);
        csv->field(rec.episode_return);
        csv->field(rec.episode_length);
        csv->field(rec.collided);
        csv->end_row();
        csv->flush();
      }
      ++episode;
      env.reset(common::derive_seed(seed, static_cast<std::uint64_t>(episode) + 1));
      ep_return = 0.0;
      ep_len = 0;
    }

    if (t > hyper.learning_starts) {
      const auto idx = buffer.sample_indices(static_cast<std::size_t>(hyper.batch_size), rng);
      const Batch batch = make_batch(buffer, idx, sim_cfg.sensing_range);

      const QLossResult ql = q_loss(bundle, batch, hyper);
      check_finite(ql.loss, "critic");
      opt_q1.step(bundle.q1, ql.grad_q1);
      opt_q2.step(bundle.q2, ql.grad_q2);

      const Eigen::MatrixXd vn = draw_noise(rng, batch.obs.rows(), 3);
      const VLossResult vl = v_loss(bundle, batch, hyper, vn, bounds);
      check_finite(vl.loss, "value");
      opt_v.step(bundle.value, vl.grad_value);

      const Eigen::MatrixXd pn = draw_noise(rng, batch.obs.rows(), 3);
      const PolicyLossResult pl = policy_loss(bundle, batch, hyper, pn, bounds);
      check_finite(pl.loss, "policy");
      opt_pi.step(bundle.policy, pl.grad_policy);

      soft_update(bundle.value_target, bundle.value, hyper.tau);
    }
  }

  result.episodes = episode;
  return result;
}

}  // namespace lcbench::pasac
