#include "lcbench/pasac/agent.hpp"

#include <cmath>
#include <stdexcept>

#include "lcbench/nn/checkpoint.hpp"

namespace lcbench::pasac {

void PasacHyper::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("PasacHyper: gamma outside [0,1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("PasacHyper: tau outside (0,1]");
  if (alpha < 0.0) throw std::invalid_argument("PasacHyper: alpha must be nonnegative");
  if (actor_lr < 0.0 || critic_lr < 0.0) throw std::invalid_argument("PasacHyper: negative learning rate");
  if (batch_size <= 0) throw std::invalid_argument("PasacHyper: batch_size must be positive");
  if (learning_starts < batch_size)
    throw std::invalid_argument("PasacHyper: learning_starts must cover one batch");
  if (total_steps <= 0) throw std::invalid_argument("PasacHyper: total_steps must be positive");
  if (buffer_capacity <= 0) throw std::invalid_argument("PasacHyper: buffer_capacity must be positive");
  if (hidden_units <= 0 || hidden_layers <= 0)
    throw std::invalid_argument("PasacHyper: hidden architecture must be positive");
}

NetworkBundle NetworkBundle::make(const PasacHyper& hyper, common::Rng& rng) {
  std::vector<int> hidden(hyper.hidden_layers, hyper.hidden_units);
  auto sizes = [&](int in, int out) {
    std::vector<int> s;
    s.push_back(in);
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
  };
  NetworkBundle b;
  b.policy = nn::Mlp::make(sizes(kObsDim, 2 * kActDim), nn::Activation::relu, rng, 1e-2);
  b.q1 = nn::Mlp::make(sizes(kObsDim + kActDim, 1), nn::Activation::relu, rng);
  b.q2 = nn::Mlp::make(sizes(kObsDim + kActDim, 1), nn::Activation::relu, rng);
  b.value = nn::Mlp::make(sizes(kObsDim, 1), nn::Activation::relu, rng);
  b.value_target = b.value;  // starts as an exact copy
  return b;
}

void NetworkBundle::save(const std::string& path) const {
  nn::save_checkpoint(path, {&policy, &q1, &q2, &value, &value_target});
}

NetworkBundle NetworkBundle::load(const std::string& path) {
  auto nets = nn::load_checkpoint(path);
  if (nets.size() != 5)
    throw nn::CheckpointError("checkpoint holds " + std::to_string(nets.size()) +
                              " networks, expected 5");
  NetworkBundle b;
  b.policy = std::move(nets[0]);
  b.q1 = std::move(nets[1]);
  b.q2 = std::move(nets[2]);
  b.value = std::move(nets[3]);
  b.value_target = std::move(nets[4]);
  if (b.policy.input_size() != kObsDim || b.policy.output_size() != 2 * kActDim)
    throw nn::CheckpointError("checkpoint policy has unexpected shape");
  return b;
}

std::array<double, 10> normalize_obs(const sim::Observation& obs, double sensing_range) {
  return {obs.d_p / sensing_range, obs.d_f / sensing_range,
          obs.d_tp / sensing_range, obs.d_tf / sensing_range,
          obs.v_tp / kSpeedScale,   obs.v_tf / kSpeedScale,
          obs.v_ego / kSpeedScale,  obs.a_ego / kAccelScale,
          obs.v_p / kSpeedScale,    obs.v_f / kSpeedScale};
}

std::vector<nn::Bounds> action_bounds(double a_min, double a_max) {
  return {{a_min, a_max}, {0.0, 1.0}, {0.0, 1.0}};
}

HybridAction select_action(const NetworkBundle& bundle, const std::array<double, 10>& norm_obs,
                           const std::vector<nn::Bounds>& bounds, bool deterministic,
                           common::Rng* rng) {
  Eigen::VectorXd x(NetworkBundle::kObsDim);
  for (int i = 0; i < NetworkBundle::kObsDim; ++i) x(i) = norm_obs[i];
  const Eigen::VectorXd out = nn::forward1(bundle.policy, x);
  const Eigen::VectorXd mu = out.head(NetworkBundle::kActDim);
  const Eigen::VectorXd log_sigma = out.tail(NetworkBundle::kActDim);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(NetworkBundle::kActDim);
  if (!deterministic) {
    if (rng == nullptr) throw std::invalid_argument("select_action: stochastic mode needs an rng");
    for (int i = 0; i < NetworkBundle::kActDim; ++i) noise(i) = rng->normal();
  }
  const nn::GaussianSample s = nn::gaussian_head(mu, log_sigma, noise, bounds);
  return HybridAction::from_parts(s.output(0), s.output(1), s.output(2));
}

Batch make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices,
                 double sensing_range) {
  const auto b = static_cast<Eigen::Index>(indices.size());
  Batch batch;
  batch.obs.resize(b, 10);
  batch.action.resize(b, 3);
  batch.reward.resize(b);
  batch.next_obs.resize(b, 10);
  batch.terminal.resize(b);
  auto scale = [&](double v, int col) {
    if (col < 4) return v / sensing_range;
    if (col == 7) return v / kAccelScale;
    return v / kSpeedScale;
  };
  for (Eigen::Index r = 0; r < b; ++r) {
    const Transition& t = buffer.at(indices[static_cast<std::size_t>(r)]);
    for (int c = 0; c < 10; ++c) {
      batch.obs(r, c) = scale(t.obs[c], c);
      batch.next_obs(r, c) = scale(t.next_obs[c], c);
    }
    for (int c = 0; c < 3; ++c) batch.action(r, c) = t.action[c];
    batch.reward(r) = t.reward;
    batch.terminal(r) = t.terminal ? 1.0 : 0.0;
  }
  return batch;
}

Eigen::MatrixXd critic_input(const Eigen::MatrixXd& norm_obs, const Eigen::MatrixXd& action_raw) {
  Eigen::MatrixXd in(norm_obs.rows(), norm_obs.cols() + action_raw.cols());
  in.leftCols(norm_obs.cols()) = norm_obs;
  in.col(norm_obs.cols()) = action_raw.col(0) / kAccelScale;
  in.rightCols(2) = action_raw.rightCols(2);
  return in;
}

QLossResult q_loss(const NetworkBundle& bundle, const Batch& batch, const PasacHyper& hyper) {
  if (batch.size() == 0) throw std::invalid_argument("q_loss: empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());

  // Bootstrapped target, no gradient flow.
  const Eigen::VectorXd v_next = nn::forward(bundle.value_target, batch.next_obs).col(0);
  const Eigen::VectorXd target =
      batch.reward.array() +
      hyper.gamma * (1.0 - batch.terminal.array()) * v_next.array();

  const Eigen::MatrixXd in = critic_input(batch.obs, batch.action);
  nn::ForwardCache c1, c2;
  const Eigen::VectorXd q1v = nn::forward(bundle.q1, in, &c1).col(0);
  const Eigen::VectorXd q2v = nn::forward(bundle.q2, in, &c2).col(0);

  const Eigen::VectorXd r1 = q1v - target;
  const Eigen::VectorXd r2 = q2v - target;
  QLossResult out;
  // Mean of 0.5 * residual^2 over batch and both critics.
  out.loss = (0.5 * r1.array().square().sum() + 0.5 * r2.array().square().sum()) /
             (2.0 * static_cast<double>(b));
  out.grad_q1 = nn::backward(bundle.q1, c1, r1 / (2.0 * static_cast<double>(b)));
  out.grad_q2 = nn::backward(bundle.q2, c2, r2 / (2.0 * static_cast<double>(b)));
  return out;
}

VLossResult v_loss(const NetworkBundle& bundle, const Batch& batch, const PasacHyper& hyper,
                   const Eigen::MatrixXd& noise, const std::vector<nn::Bounds>& bounds) {
  if (batch.size() == 0) throw std::invalid_argument("v_loss: empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());

  // Fresh action per state; the whole target is treated as a constant.
  const Eigen::MatrixXd pol = nn::forward(bundle.policy, batch.obs);
  const nn::HeadBatch hb = nn::head_forward(pol.leftCols(3), pol.rightCols(3), noise, bounds);
  const Eigen::MatrixXd qin = critic_input(batch.obs, hb.output);
  const Eigen::VectorXd q1v = nn::forward(bundle.q1, qin).col(0);
  const Eigen::VectorXd q2v = nn::forward(bundle.q2, qin).col(0);
  const Eigen::VectorXd target =
      q1v.cwiseMin(q2v).array() - hyper.alpha * hb.log_prob.array();

  nn::ForwardCache cv;
  const Eigen::VectorXd v = nn::forward(bundle.value, batch.obs, &cv).col(0);
  const Eigen::VectorXd resid = v - target;
  VLossResult out;
  out.loss = 0.5 * resid.array().square().mean();
  out.grad_value = nn::backward(bundle.value, cv, resid / static_cast<double>(b));
  return out;
}

PolicyLossResult policy_loss(const NetworkBundle& bundle, const Batch& batch,
                             const PasacHyper& hyper, const Eigen::MatrixXd& noise,
                             const std::vector<nn::Bounds>& bounds) {
  if (batch.size() == 0) throw std::invalid_argument("policy_loss: empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(b);

  nn::ForwardCache cp;
  const Eigen::MatrixXd pol = nn::forward(bundle.policy, batch.obs, &cp);
  const nn::HeadBatch hb = nn::head_forward(pol.leftCols(3), pol.rightCols(3), noise, bounds);

  const Eigen::MatrixXd qin = critic_input(batch.obs, hb.output);
  nn::ForwardCache c1, c2;
  const Eigen::VectorXd q1v = nn::forward(bundle.q1, qin, &c1).col(0);
  const Eigen::VectorXd q2v = nn::forward(bundle.q2, qin, &c2).col(0);
  const Eigen::VectorXd qmin = q1v.cwiseMin(q2v);

  PolicyLossResult out;
  out.loss = (hyper.alpha * hb.log_prob.array() - qmin.array()).mean();

  // dLoss/dQ_i routed through the pointwise-min critic only.
  Eigen::VectorXd d1 = Eigen::VectorXd::Zero(b);
  Eigen::VectorXd d2 = Eigen::VectorXd::Zero(b);
  for (Eigen::Index r = 0; r < b; ++r) {
    (q1v(r) <= q2v(r) ? d1(r) : d2(r)) = -inv_b;
  }
  const nn::Gradients gq1 = nn::backward(bundle.q1, c1, d1, /*params*/ false, /*input*/ true);
  const nn::Gradients gq2 = nn::backward(bundle.q2, c2, d2, false, true);
  // Action columns of the critic input; undo the acceleration scaling.
  Eigen::MatrixXd dout = gq1.dx.rightCols(3) + gq2.dx.rightCols(3);
  dout.col(0) /= kAccelScale;

  const Eigen::VectorXd dlogp = Eigen::VectorXd::Constant(b, hyper.alpha * inv_b);
  Eigen::MatrixXd dmu, dls;
  nn::head_backward(hb, dlogp, dout, bounds, dmu, dls);

  Eigen::MatrixXd dpol(b, 6);
  dpol.leftCols(3) = dmu;
  dpol.rightCols(3) = dls;
  out.grad_policy = nn::backward(bundle.policy, cp, dpol);
  return out;
}

void soft_update(nn::Mlp& target, const nn::Mlp& source, double tau) {
  if (target.layer_sizes != source.layer_sizes)
    throw std::invalid_argument("soft_update: architecture mismatch");
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    target.weights[l] = tau * source.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * source.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

}  // namespace lcbench::pasac
