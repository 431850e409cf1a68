#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lcbench/common/rng.hpp"

namespace lcbench::nn {

enum class Activation : std::uint8_t { relu = 0, tanh = 1, linear = 2 };

// Dense multilayer perceptron on 64-bit floats. Weights are stored
// (fan_in x fan_out) so a batch forward is row-major X * W + b.
struct Mlp {
  std::vector<int> layer_sizes;                // [in, hidden..., out]
  std::vector<Eigen::MatrixXd> weights;        // per layer, fan_in x fan_out
  std::vector<Eigen::VectorXd> biases;         // per layer
  std::vector<Activation> activations;         // per layer; output usually linear

  // He init for rectifier hidden layers, Xavier otherwise; the final layer is
  // scaled by final_scale (small values keep initial policies near center).
  static Mlp make(std::vector<int> sizes, Activation hidden, common::Rng& rng,
                  double final_scale = 1.0);

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }

  // Flat parameter view in serialization order: per layer, weights row-major
  // then bias. Used by the optimizer-free tooling (finite differences).
  std::size_t param_count() const;
  double& param(std::size_t index);
  double param(std::size_t index) const;
};

struct ForwardCache {
  const Mlp* owner = nullptr;
  Eigen::MatrixXd input;               // B x in
  std::vector<Eigen::MatrixXd> post;   // activations per layer, B x n_l
  std::vector<Eigen::MatrixXd> pre;    // pre-activations per layer (hidden only)
};

// Batch forward: x is B x input_size. With a cache the per-layer activations
// are retained for backward.
Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& x, ForwardCache* cache = nullptr);
Eigen::VectorXd forward1(const Mlp& net, const Eigen::VectorXd& x);

struct Gradients {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
  Eigen::MatrixXd dx;  // filled when want_input_grad

  void setZero();
  bool allFinite() const;
};

Gradients make_zero_gradients(const Mlp& net);

// Reverse-mode gradients of sum_b <dy_b, f(x_b)>; dy is B x output_size.
// The cache must come from a forward over the same net (stale caches are
// rejected).
Gradients backward(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& dy,
                   bool want_param_grads = true, bool want_input_grad = false);

}  // namespace lcbench::nn
