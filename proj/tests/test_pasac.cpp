#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fd_oracle.hpp"
#include "lcbench/nn/adam.hpp"
#include "lcbench/pasac/agent.hpp"
#include "lcbench/pasac/train.hpp"

using namespace lcbench;
using pasac::Batch;
using pasac::NetworkBundle;
using pasac::PasacHyper;
using pasac::ReplayBuffer;
using pasac::Transition;

namespace {

PasacHyper tiny_hyper() {
  PasacHyper h;
  h.hidden_units = 12;
  h.hidden_layers = 2;
  h.batch_size = 6;
  h.learning_starts = 6;
  return h;
}

Batch random_batch(common::Rng& rng, int n, bool with_terminals = true) {
  Batch b;
  b.obs.resize(n, 10);
  b.action.resize(n, 3);
  b.reward.resize(n);
  b.next_obs.resize(n, 10);
  b.terminal.resize(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < 10; ++c) {
      b.obs(r, c) = rng.uniform(-1, 1);
      b.next_obs(r, c) = rng.uniform(-1, 1);
    }
    b.action(r, 0) = rng.uniform(-4.5, 2.6);
    b.action(r, 1) = rng.uniform01();
    b.action(r, 2) = rng.uniform01();
    b.reward(r) = rng.uniform(-5, 0);
    b.terminal(r) = with_terminals && rng.uniform01() < 0.3 ? 1.0 : 0.0;
  }
  return b;
}

Transition make_transition(common::Rng& rng) {
  Transition t;
  for (int i = 0; i < 10; ++i) {
    t.obs[i] = rng.uniform01();
    t.next_obs[i] = rng.uniform01();
  }
  t.action = {rng.uniform(-4.5, 2.6), rng.uniform01(), rng.uniform01()};
  t.reward = rng.uniform(-3, 0);
  t.terminal = false;
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("replay buffer keeps exactly the last capacity items in order") {
  ReplayBuffer buf(16);
  common::Rng rng(1);
  std::vector<Transition> pushed;
  for (int i = 0; i < 16 + 23; ++i) {
    Transition t = make_transition(rng);
    t.reward = -static_cast<double>(i);  // tag with insertion index
    buf.push(t);
    pushed.push_back(t);
  }
  CHECK(buf.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(buf.at(i).reward == pushed[23 + i].reward);  // oldest-first view
  }
}

TEST_CASE("replay sampling is without replacement and in range") {
  ReplayBuffer buf(64);
  common::Rng rng(2);
  for (int i = 0; i < 40; ++i) buf.push(make_transition(rng));
  for (int trial = 0; trial < 50; ++trial) {
    const auto idx = buf.sample_indices(32, rng);
    CHECK(idx.size() == 32);
    std::vector<bool> seen(buf.size(), false);
    for (auto i : idx) {
      REQUIRE(i < buf.size());
      CHECK_FALSE(seen[i]);
      seen[i] = true;
    }
  }
  CHECK_THROWS_AS(buf.sample_indices(41, rng), std::invalid_argument);
}

TEST_CASE("normalize_obs scales gaps, speeds and acceleration") {
  sim::Observation obs;
  obs.d_p = 150;
  obs.d_f = 75;
  obs.d_tp = 0;
  obs.d_tf = 30;
  obs.v_tp = 25;
  obs.v_tf = 0;
  obs.v_ego = 13.89;
  obs.a_ego = -4.5;
  obs.v_p = 12.5;
  obs.v_f = 5;
  const auto n = pasac::normalize_obs(obs, 150.0);
  CHECK(n[0] == doctest::Approx(1.0));
  CHECK(n[1] == doctest::Approx(0.5));
  CHECK(n[3] == doctest::Approx(0.2));
  CHECK(n[4] == doctest::Approx(1.0));
  CHECK(n[6] == doctest::Approx(0.5556).epsilon(1e-3));
  CHECK(n[7] == doctest::Approx(-0.9));
  CHECK(n[8] == doctest::Approx(0.5));
}

TEST_CASE("discrete resolution") {
  CHECK(resolve_discrete(0.3, 0.7) == 1);
  CHECK(resolve_discrete(0.7, 0.3) == 0);
  CHECK(resolve_discrete(0.5, 0.5) == 0);  // tie -> stay

  // argmax is invariant under strictly monotone rescaling of both weights
  common::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double k0 = rng.uniform01(), k1 = rng.uniform01();
    auto mono = [&](double x) { return 2.0 * x * x * x + 0.5 * x + 1.0; };
    CHECK(resolve_discrete(k0, k1) == resolve_discrete(mono(k0), mono(k1)));
  }
}

TEST_CASE("select_action") {
  common::Rng rng(7);
  const auto hyper = tiny_hyper();
  const auto bundle = NetworkBundle::make(hyper, rng);
  const auto bounds = pasac::action_bounds(-4.5, 2.6);
  std::array<double, 10> obs{};
  for (auto& v : obs) v = rng.uniform01();

  SUBCASE("deterministic repeats are identical") {
    const auto a1 = pasac::select_action(bundle, obs, bounds, true, nullptr);
    const auto a2 = pasac::select_action(bundle, obs, bounds, true, nullptr);
    CHECK(a1.a_cont == a2.a_cont);
    CHECK(a1.k_weights == a2.k_weights);
    CHECK(a1.discrete == a2.discrete);
  }

  SUBCASE("actions respect their ranges and the argmax rule") {
    common::Rng noise(11);
    for (int i = 0; i < 500; ++i) {
      const auto a = pasac::select_action(bundle, obs, bounds, false, &noise);
      CHECK(a.a_cont >= -4.5);
      CHECK(a.a_cont <= 2.6);
      CHECK(a.k_weights[0] >= 0.0);
      CHECK(a.k_weights[0] <= 1.0);
      CHECK(a.k_weights[1] >= 0.0);
      CHECK(a.k_weights[1] <= 1.0);
      CHECK(a.discrete == resolve_discrete(a.k_weights[0], a.k_weights[1]));
    }
  }
}

TEST_CASE("q_loss") {
  common::Rng rng(17);
  auto hyper = tiny_hyper();
  auto bundle = NetworkBundle::make(hyper, rng);

  SUBCASE("gamma = 0 with unit reward against zero critics") {
    for (auto& w : bundle.q1.weights) w.setZero();
    for (auto& b : bundle.q1.biases) b.setZero();
    for (auto& w : bundle.q2.weights) w.setZero();
    for (auto& b : bundle.q2.biases) b.setZero();
    hyper.gamma = 0.0;
    auto batch = random_batch(rng, 5);
    batch.reward.setConstant(-1.0);
    const auto r = pasac::q_loss(bundle, batch, hyper);
    CHECK(r.loss == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("zero residual means zero loss and zero gradients") {
    for (auto& w : bundle.q1.weights) w.setZero();
    for (auto& b : bundle.q1.biases) b.setZero();
    for (auto& w : bundle.q2.weights) w.setZero();
    for (auto& b : bundle.q2.biases) b.setZero();
    for (auto& w : bundle.value_target.weights) w.setZero();
    for (auto& b : bundle.value_target.biases) b.setZero();
    auto batch = random_batch(rng, 4);
    batch.reward.setZero();
    const auto r = pasac::q_loss(bundle, batch, hyper);
    CHECK(r.loss == doctest::Approx(0.0));
    for (const auto& dw : r.grad_q1.dw) CHECK(dw.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& dw : r.grad_q2.dw) CHECK(dw.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("terminal transitions ignore the bootstrap value") {
    auto batch = random_batch(rng, 4, false);
    batch.terminal.setConstant(1.0);
    const auto before = pasac::q_loss(bundle, batch, hyper);
    for (auto& w : bundle.value_target.weights) w.array() += 3.21;
    const auto after = pasac::q_loss(bundle, batch, hyper);
    CHECK(before.loss == after.loss);
  }

  SUBCASE("critic gradients match finite differences") {
    for (int trial = 0; trial < 3; ++trial) {
      auto b2 = NetworkBundle::make(hyper, rng);
      const auto batch = random_batch(rng, 6);
      auto loss = [&]() { return pasac::q_loss(b2, batch, hyper).loss; };
      const auto analytic = pasac::q_loss(b2, batch, hyper);
      const auto rep1 = testing::fd_check(b2.q1, loss, [&](std::size_t i) {
        return testing::grad_at(analytic.grad_q1, b2.q1, i);
      });
      CHECK(rep1.max_rel_err < 1e-4);
      const auto rep2 = testing::fd_check(b2.q2, loss, [&](std::size_t i) {
        return testing::grad_at(analytic.grad_q2, b2.q2, i);
      });
      CHECK(rep2.max_rel_err < 1e-4);
    }
  }
}

TEST_CASE("v_loss") {
  common::Rng rng(23);
  auto hyper = tiny_hyper();

  SUBCASE("value gradients match finite differences") {
    for (int trial = 0; trial < 3; ++trial) {
      auto bundle = NetworkBundle::make(hyper, rng);
      const auto batch = random_batch(rng, 6);
      Eigen::MatrixXd noise(6, 3);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 3; ++c) noise(r, c) = rng.normal();
      const auto bounds = pasac::action_bounds(-4.5, 2.6);
      auto loss = [&]() { return pasac::v_loss(bundle, batch, hyper, noise, bounds).loss; };
      const auto analytic = pasac::v_loss(bundle, batch, hyper, noise, bounds);
      const auto rep = testing::fd_check(bundle.value, loss, [&](std::size_t i) {
        return testing::grad_at(analytic.grad_value, bundle.value, i);
      });
      CHECK(rep.max_rel_err < 1e-4);
    }
  }

  SUBCASE("alpha = 0 reduces the target to the twin minimum") {
    auto bundle = NetworkBundle::make(hyper, rng);
    const auto batch = random_batch(rng, 5);
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(5, 3);
    const auto bounds = pasac::action_bounds(-4.5, 2.6);
    auto h0 = hyper;
    h0.alpha = 0.0;
    const Eigen::MatrixXd pol = nn::forward(bundle.policy, batch.obs);
    const auto hb = nn::head_forward(pol.leftCols(3), pol.rightCols(3), noise, bounds);
    const Eigen::MatrixXd qin = pasac::critic_input(batch.obs, hb.output);
    const Eigen::VectorXd expect =
        nn::forward(bundle.q1, qin).col(0).cwiseMin(nn::forward(bundle.q2, qin).col(0));
    const Eigen::VectorXd v = nn::forward(bundle.value, batch.obs).col(0);
    const double want = 0.5 * (v - expect).array().square().mean();
    const auto r = pasac::v_loss(bundle, batch, h0, noise, bounds);
    CHECK(r.loss == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("zero residual gives zero loss") {
    auto bundle = NetworkBundle::make(hyper, rng);
    for (auto& w : bundle.value.weights) w.setZero();
    for (auto& b : bundle.value.biases) b.setZero();
    for (auto& w : bundle.q1.weights) w.setZero();
    for (auto& b : bundle.q1.biases) b.setZero();
    for (auto& w : bundle.q2.weights) w.setZero();
    for (auto& b : bundle.q2.biases) b.setZero();
    auto h0 = hyper;
    h0.alpha = 0.0;
    const auto batch = random_batch(rng, 4);
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(4, 3);
    const auto r = pasac::v_loss(bundle, batch, h0, noise, pasac::action_bounds(-4.5, 2.6));
    CHECK(r.loss == doctest::Approx(0.0));
  }
}

TEST_CASE("policy_loss") {
  common::Rng rng(29);
  auto hyper = tiny_hyper();
  const auto bounds = pasac::action_bounds(-4.5, 2.6);

  SUBCASE("policy gradients match finite differences with fixed noise") {
    for (int trial = 0; trial < 3; ++trial) {
      auto bundle = NetworkBundle::make(hyper, rng);
      const auto batch = random_batch(rng, 6);
      Eigen::MatrixXd noise(6, 3);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 3; ++c) noise(r, c) = rng.normal();
      auto loss = [&]() { return pasac::policy_loss(bundle, batch, hyper, noise, bounds).loss; };
      const auto analytic = pasac::policy_loss(bundle, batch, hyper, noise, bounds);
      const auto rep = testing::fd_check(bundle.policy, loss, [&](std::size_t i) {
        return testing::grad_at(analytic.grad_policy, bundle.policy, i);
      });
      CHECK(rep.max_rel_err < 1e-4);
    }
  }

  SUBCASE("alpha = 0 with action-independent critics gives zero gradient") {
    auto bundle = NetworkBundle::make(hyper, rng);
    for (auto* q : {&bundle.q1, &bundle.q2}) {
      q->weights[0].bottomRows(3).setZero();  // critics ignore the action inputs
    }
    auto h0 = hyper;
    h0.alpha = 0.0;
    const auto batch = random_batch(rng, 5);
    Eigen::MatrixXd noise(5, 3);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 3; ++c) noise(r, c) = rng.normal();
    const auto r = pasac::policy_loss(bundle, batch, h0, noise, bounds);
    for (const auto& dw : r.grad_policy.dw)
      CHECK(dw.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }

  SUBCASE("loss decreases over 100 updates on a frozen batch") {
    auto bundle = NetworkBundle::make(hyper, rng);
    const auto batch = random_batch(rng, 8);
    Eigen::MatrixXd noise(8, 3);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 3; ++c) noise(r, c) = rng.normal();
    nn::Adam opt = nn::Adam::make(bundle.policy, 1e-3);
    const double first = pasac::policy_loss(bundle, batch, hyper, noise, bounds).loss;
    double last = first;
    for (int i = 0; i < 100; ++i) {
      const auto r = pasac::policy_loss(bundle, batch, hyper, noise, bounds);
      opt.step(bundle.policy, r.grad_policy);
      last = r.loss;
    }
    CHECK(last < first);
  }
}

TEST_CASE("soft_update") {
  common::Rng rng(31);
  auto hyper = tiny_hyper();
  auto bundle = NetworkBundle::make(hyper, rng);
  auto target = bundle.value_target;

  SUBCASE("tau = 1 copies the source") {
    pasac::soft_update(target, bundle.value, 1.0);
    for (std::size_t l = 0; l < target.layer_count(); ++l)
      CHECK((target.weights[l].array() == bundle.value.weights[l].array()).all());
  }

  SUBCASE("tau = 0 is a no-op") {
    const auto before = target;
    pasac::soft_update(target, bundle.value, 0.0);
    for (std::size_t l = 0; l < target.layer_count(); ++l)
      CHECK((target.weights[l].array() == before.weights[l].array()).all());
  }

  SUBCASE("scalar blend example") {
    nn::Mlp one = bundle.value;
    nn::Mlp zero = bundle.value;
    for (auto& w : one.weights) w.setOnes();
    for (auto& b : one.biases) b.setOnes();
    for (auto& w : zero.weights) w.setZero();
    for (auto& b : zero.biases) b.setZero();
    pasac::soft_update(zero, one, 0.005);
    CHECK(zero.weights[0](0, 0) == doctest::Approx(0.005).epsilon(1e-12));
  }

  SUBCASE("repeated updates decay the distance geometrically") {
    const double tau = 0.25;
    double prev_norm = -1.0;
    for (int i = 0; i < 12; ++i) {
      double norm = 0.0;
      for (std::size_t l = 0; l < target.layer_count(); ++l)
        norm += (target.weights[l] - bundle.value.weights[l]).squaredNorm() +
                (target.biases[l] - bundle.value.biases[l]).squaredNorm();
      norm = std::sqrt(norm);
      if (prev_norm >= 0.0) CHECK(norm == doctest::Approx(prev_norm * (1.0 - tau)).epsilon(1e-9));
      prev_norm = norm;
      pasac::soft_update(target, bundle.value, tau);
    }
  }
}

TEST_CASE("training smoke run") {
  sim::SimConfig cfg;
  auto hyper = tiny_hyper();
  hyper.total_steps = 1000;
  hyper.learning_starts = 200;
  hyper.batch_size = 32;
  hyper.buffer_capacity = 10000;

  const auto dir = std::filesystem::temp_directory_path() / "lcbench_train_smoke";
  std::filesystem::create_directories(dir);
  const std::string curve = (dir / "curve.csv").string();

  common::Rng rng(41);
  auto bundle = NetworkBundle::make(hyper, rng);
  const auto result = pasac::train(cfg, hyper, bundle, 4242, curve);
  CHECK(result.env_steps == 1000);
  CHECK(result.episodes >= 1);

  SUBCASE("curve CSV is byte-identical on a second run") {
    common::Rng rng2(41);
    auto bundle2 = NetworkBundle::make(hyper, rng2);
    const std::string curve2 = (dir / "curve2.csv").string();
    pasac::train(cfg, hyper, bundle2, 4242, curve2);
    CHECK(read_file(curve) == read_file(curve2));
    CHECK_FALSE(read_file(curve).empty());
    for (std::size_t l = 0; l < bundle.policy.layer_count(); ++l)
      CHECK((bundle.policy.weights[l].array() == bundle2.policy.weights[l].array()).all());
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("no parameter changes before learning_starts") {
  sim::SimConfig cfg;
  auto hyper = tiny_hyper();
  hyper.total_steps = 500;
  hyper.learning_starts = 500;

  common::Rng rng(43);
  auto bundle = NetworkBundle::make(hyper, rng);
  common::Rng rng2(43);
  const auto snapshot = NetworkBundle::make(hyper, rng2);

  pasac::train(cfg, hyper, bundle, 7, "");
  for (std::size_t l = 0; l < bundle.policy.layer_count(); ++l) {
    CHECK((bundle.policy.weights[l].array() == snapshot.policy.weights[l].array()).all());
    CHECK((bundle.value.weights[l].array() == snapshot.value.weights[l].array()).all());
  }

  auto hyper2 = hyper;
  hyper2.total_steps = 501;
  common::Rng rng3(43);
  auto bundle2 = NetworkBundle::make(hyper2, rng3);
  pasac::train(cfg, hyper2, bundle2, 7, "");
  bool changed = false;
  for (std::size_t l = 0; l < bundle2.value.layer_count() && !changed; ++l)
    changed = !(bundle2.value.weights[l].array() == snapshot.value.weights[l].array()).all();
  CHECK(changed);
}

TEST_CASE("bundle checkpoints round-trip through the agent wrapper") {
  common::Rng rng(47);
  const auto hyper = tiny_hyper();
  auto bundle = NetworkBundle::make(hyper, rng);
  const auto path =
      (std::filesystem::temp_directory_path() / "lcbench_bundle_test.lcb").string();
  bundle.save(path);
  const auto loaded = NetworkBundle::load(path);
  for (std::size_t l = 0; l < bundle.policy.layer_count(); ++l) {
    CHECK((loaded.policy.weights[l].array() == bundle.policy.weights[l].array()).all());
    CHECK((loaded.value_target.weights[l].array() ==
           bundle.value_target.weights[l].array()).all());
  }
  std::filesystem::remove(path);
}
