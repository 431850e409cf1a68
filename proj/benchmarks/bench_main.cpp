#include <benchmark/benchmark.h>

#include "lcbench/common/rng.hpp"
#include "lcbench/mpc/mpc.hpp"
#include "lcbench/nn/adam.hpp"
#include "lcbench/pasac/agent.hpp"
#include "lcbench/pasac/train.hpp"
#include "lcbench/sim/simulation.hpp"

namespace {

using namespace lcbench;

void BM_SimStep(benchmark::State& state) {
  sim::SimConfig cfg;
  sim::Simulation env(cfg, 1);
  const HybridAction hold = HybridAction::stay(0.0);
  std::uint64_t episode = 0;
  for (auto _ : state) {
    if (env.done()) env.reset(common::derive_seed(2, ++episode));
    benchmark::DoNotOptimize(env.step(hold));
  }
}
BENCHMARK(BM_SimStep);

void BM_MpcSolve(benchmark::State& state) {
  mpc::MpcConfig cfg;
  mpc::MpcState x0{20.0, 30.0, 12.5, -1.0, 0.5, 0.2, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpc::solve(x0, mpc::LaneRole::current, cfg));
  }
}
BENCHMARK(BM_MpcSolve);

void BM_TlaccDecide(benchmark::State& state) {
  mpc::MpcConfig cfg;
  sim::Observation obs;
  obs.d_p = 18.0;
  obs.d_f = 40.0;
  obs.d_tp = 150.0;
  obs.d_tf = 150.0;
  obs.v_tp = 13.89;
  obs.v_tf = 13.89;
  obs.v_ego = 11.0;
  obs.a_ego = 0.0;
  obs.v_p = 10.5;
  obs.v_f = 12.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpc::tlacc_decide(obs, 0.0, cfg));
  }
}
BENCHMARK(BM_TlaccDecide);

void BM_GradientStep(benchmark::State& state) {
  common::Rng rng(7);
  pasac::PasacHyper hyper;
  auto bundle = pasac::NetworkBundle::make(hyper, rng);
  pasac::ReplayBuffer buffer(1024);
  sim::SimConfig cfg;
  sim::Simulation env(cfg, 3);
  const auto bounds = pasac::action_bounds(cfg.a_min, cfg.a_max);
  for (int i = 0; i < 512; ++i) {
    const auto obs = env.observe();
    const auto act =
        pasac::select_action(bundle, pasac::normalize_obs(obs, cfg.sensing_range), bounds, false, &rng);
    const auto sr = env.step(act);
    pasac::Transition t;
    t.obs = obs.as_array();
    t.action = {act.a_cont, act.k_weights[0], act.k_weights[1]};
    t.reward = sr.reward.total;
    t.next_obs = sr.observation.as_array();
    t.terminal = sr.collided;
    buffer.push(t);
    if (env.done()) env.reset(common::derive_seed(3, i));
  }
  nn::Adam q1 = nn::Adam::make(bundle.q1, hyper.critic_lr);
  nn::Adam q2 = nn::Adam::make(bundle.q2, hyper.critic_lr);
  nn::Adam v = nn::Adam::make(bundle.value, hyper.critic_lr);
  nn::Adam pi = nn::Adam::make(bundle.policy, hyper.actor_lr);
  for (auto _ : state) {
    const auto idx = buffer.sample_indices(hyper.batch_size, rng);
    const auto batch = pasac::make_batch(buffer, idx, cfg.sensing_range);
    const auto ql = pasac::q_loss(bundle, batch, hyper);
    q1.step(bundle.q1, ql.grad_q1);
    q2.step(bundle.q2, ql.grad_q2);
    Eigen::MatrixXd n1(batch.obs.rows(), 3), n2(batch.obs.rows(), 3);
    for (Eigen::Index r = 0; r < n1.rows(); ++r)
      for (Eigen::Index c = 0; c < 3; ++c) {
        n1(r, c) = rng.normal();
        n2(r, c) = rng.normal();
      }
    const auto vl = pasac::v_loss(bundle, batch, hyper, n1, bounds);
    v.step(bundle.value, vl.grad_value);
    const auto pl = pasac::policy_loss(bundle, batch, hyper, n2, bounds);
    pi.step(bundle.policy, pl.grad_policy);
    pasac::soft_update(bundle.value_target, bundle.value, hyper.tau);
  }
}
BENCHMARK(BM_GradientStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
