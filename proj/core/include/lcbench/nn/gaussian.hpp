#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lcbench::nn {

struct Bounds {
  double lo = -1.0;
  double hi = 1.0;
};

// Squashed-Gaussian policy head. u = mu + sigma * noise is pushed through a
// tanh rescaled per dimension onto [lo, hi]; the log-probability carries the
// change-of-variables correction, summed over dimensions.
struct GaussianSample {
  Eigen::VectorXd u;       // pre-squash draw
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;   // after the log-sigma clamp
  Eigen::VectorXd output;  // squashed, inside bounds
  double log_prob = 0.0;
};

// Batched version used by the losses; rows are samples.
struct HeadBatch {
  Eigen::MatrixXd mu, log_sigma_clamped, sigma, noise;
  Eigen::MatrixXd u, t, output;  // t = tanh(u)
  Eigen::VectorXd log_prob;      // per row
};

inline constexpr double kLogSigmaMin = -20.0;
inline constexpr double kLogSigmaMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

GaussianSample gaussian_head(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_sigma,
                             const Eigen::VectorXd& noise, const std::vector<Bounds>& bounds);

HeadBatch head_forward(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_sigma,
                       const Eigen::MatrixXd& noise, const std::vector<Bounds>& bounds);

// Accumulates d(loss)/d(mu) and d(loss)/d(log_sigma) given upstream
// gradients d(loss)/d(log_prob) per row and d(loss)/d(output) per element.
void head_backward(const HeadBatch& hb, const Eigen::VectorXd& dlogp,
                   const Eigen::MatrixXd& doutput, const std::vector<Bounds>& bounds,
                   Eigen::MatrixXd& dmu, Eigen::MatrixXd& dlog_sigma);

}  // namespace lcbench::nn
