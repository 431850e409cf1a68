#include "lcbench/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace lcbench::nn {

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::relu:
      return z.cwiseMax(0.0);
    case Activation::tanh:
      return z.array().tanh().matrix();
    case Activation::linear:
      return z;
  }
  throw std::logic_error("unknown activation");
}

}  // namespace

Mlp Mlp::make(std::vector<int> sizes, Activation hidden, common::Rng& rng,
              double final_scale) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp::make: need at least two layer sizes");
  Mlp net;
  net.layer_sizes = std::move(sizes);
  const std::size_t layers = net.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int fan_in = net.layer_sizes[l];
    const int fan_out = net.layer_sizes[l + 1];
    if (fan_in <= 0 || fan_out <= 0)
      throw std::invalid_argument("Mlp::make: layer sizes must be positive");
    const bool last = l + 1 == layers;
    const Activation act = last ? Activation::linear : hidden;
    Eigen::MatrixXd w(fan_in, fan_out);
    if (act == Activation::relu || (last && hidden == Activation::relu)) {
      const double std = std::sqrt(2.0 / fan_in);
      for (int r = 0; r < fan_in; ++r)
        for (int c = 0; c < fan_out; ++c) w(r, c) = std * rng.normal();
    } else {
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      for (int r = 0; r < fan_in; ++r)
        for (int c = 0; c < fan_out; ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    if (last && final_scale != 1.0) w *= final_scale;
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    net.activations.push_back(act);
  }
  return net;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
  return n;
}

double& Mlp::param(std::size_t index) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    auto& w = weights[l];
    const auto wn = static_cast<std::size_t>(w.size());
    if (index < wn) {
      const auto cols = static_cast<std::size_t>(w.cols());
      return w(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
    }
    index -= wn;
    auto& b = biases[l];
    const auto bn = static_cast<std::size_t>(b.size());
    if (index < bn) return b(static_cast<Eigen::Index>(index));
    index -= bn;
  }
  throw std::out_of_range("Mlp::param index");
}

double Mlp::param(std::size_t index) const { return const_cast<Mlp*>(this)->param(index); }

Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& x, ForwardCache* cache) {
  if (x.cols() != net.input_size())
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " columns, expected " + std::to_string(net.input_size()));
  if (cache) {
    cache->owner = &net;
    cache->input = x;
    cache->post.clear();
    cache->pre.clear();
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd z = a * net.weights[l];
    z.rowwise() += net.biases[l].transpose();
    if (cache) cache->pre.push_back(z);
    a = apply_activation(z, net.activations[l]);
    if (cache) cache->post.push_back(a);
  }
  return a;
}

Eigen::VectorXd forward1(const Mlp& net, const Eigen::VectorXd& x) {
  Eigen::MatrixXd row = x.transpose();
  return forward(net, row).transpose().col(0);
}

void Gradients::setZero() {
  for (auto& m : dw) m.setZero();
  for (auto& v : db) v.setZero();
  dx.setZero();
}

bool Gradients::allFinite() const {
  for (const auto& m : dw)
    if (!m.allFinite()) return false;
  for (const auto& v : db)
    if (!v.allFinite()) return false;
  return true;
}

Gradients make_zero_gradients(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.dw.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.db.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

Gradients backward(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& dy,
                   bool want_param_grads, bool want_input_grad) {
  if (cache.owner != &net || cache.post.size() != net.layer_count())
    throw std::invalid_argument("backward: cache does not belong to this network");
  if (dy.rows() != cache.input.rows() || dy.cols() != net.output_size())
    throw std::invalid_argument("backward: output gradient shape mismatch");

  Gradients g;
  if (want_param_grads) {
    g.dw.resize(net.layer_count());
    g.db.resize(net.layer_count());
  }

  Eigen::MatrixXd delta = dy;  // dLoss/dZ of the current layer
  for (std::size_t il = net.layer_count(); il-- > 0;) {
    // activation derivative
    switch (net.activations[il]) {
      case Activation::relu:
        delta = (cache.pre[il].array() > 0.0).select(delta, 0.0);
        break;
      case Activation::tanh:
        delta = delta.cwiseProduct(
            (1.0 - cache.post[il].array().square()).matrix());
        break;
      case Activation::linear:
        break;
    }
    const Eigen::MatrixXd& below = il == 0 ? cache.input : cache.post[il - 1];
    if (want_param_grads) {
      g.dw[il].noalias() = below.transpose() * delta;
      g.db[il] = delta.colwise().sum();
    }
    if (il > 0 || want_input_grad) {
      delta = (delta * net.weights[il].transpose()).eval();
    }
  }
  if (want_input_grad) g.dx = delta;
  return g;
}

}  // namespace lcbench::nn
