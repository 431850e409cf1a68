#pragma once

#include <cmath>
#include <stdexcept>

#include "lcbench/nn/mlp.hpp"

namespace lcbench::nn {

// Bias-corrected Adam over one network's parameters.
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;

  static Adam make(const Mlp& net, double lr) {
    Adam a;
    a.lr = lr;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      a.m_w.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
      a.v_w.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
      a.m_b.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
      a.v_b.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    return a;
  }

  // In-place update; throws std::runtime_error on non-finite gradients.
  void step(Mlp& net, const Gradients& g) {
    if (!g.allFinite()) throw std::runtime_error("Adam::step: non-finite gradient");
    if (g.dw.size() != net.layer_count())
      throw std::runtime_error("Adam::step: gradient/network layer mismatch");
    ++step_count;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      m_w[l] = beta1 * m_w[l] + (1.0 - beta1) * g.dw[l];
      v_w[l] = beta2 * v_w[l] + (1.0 - beta2) * g.dw[l].cwiseProduct(g.dw[l]);
      net.weights[l].array() -=
          lr * (m_w[l].array() / c1) / ((v_w[l].array() / c2).sqrt() + eps);
      m_b[l] = beta1 * m_b[l] + (1.0 - beta1) * g.db[l];
      v_b[l] = beta2 * v_b[l] + (1.0 - beta2) * g.db[l].cwiseProduct(g.db[l]);
      net.biases[l].array() -=
          lr * (m_b[l].array() / c1) / ((v_b[l].array() / c2).sqrt() + eps);
    }
  }
};

}  // namespace lcbench::nn
