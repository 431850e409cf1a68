#include "lcbench/nn/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace lcbench::nn {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)
}

HeadBatch head_forward(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& log_sigma,
                       const Eigen::MatrixXd& noise, const std::vector<Bounds>& bounds) {
  if (mu.rows() != log_sigma.rows() || mu.cols() != log_sigma.cols() ||
      mu.rows() != noise.rows() || mu.cols() != noise.cols() ||
      static_cast<std::size_t>(mu.cols()) != bounds.size())
    throw std::invalid_argument("head_forward: shape mismatch");

  HeadBatch hb;
  hb.mu = mu;
  hb.noise = noise;
  hb.log_sigma_clamped = log_sigma.cwiseMax(kLogSigmaMin).cwiseMin(kLogSigmaMax);
  hb.sigma = hb.log_sigma_clamped.array().exp().matrix();
  hb.u = mu + hb.sigma.cwiseProduct(noise);
  // tanh rounds to exactly +-1 for |u| > ~19; keep outputs strictly inside
  // their bounds.
  constexpr double kTanhLimit = 1.0 - 1e-12;
  hb.t = hb.u.array().tanh().cwiseMax(-kTanhLimit).cwiseMin(kTanhLimit).matrix();

  const auto rows = mu.rows();
  const auto dims = mu.cols();
  hb.output.resize(rows, dims);
  hb.log_prob = Eigen::VectorXd::Zero(rows);
  for (Eigen::Index d = 0; d < dims; ++d) {
    const double scale = 0.5 * (bounds[d].hi - bounds[d].lo);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double t = hb.t(r, d);
      hb.output(r, d) = bounds[d].lo + (t + 1.0) * scale;
      const double eps = hb.noise(r, d);
      const double normal_logp = -0.5 * eps * eps - hb.log_sigma_clamped(r, d) - kHalfLog2Pi;
      const double log_det = std::log(scale) + std::log(1.0 - t * t + kSquashEps);
      hb.log_prob(r) += normal_logp - log_det;
    }
  }
  return hb;
}

GaussianSample gaussian_head(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_sigma,
                             const Eigen::VectorXd& noise, const std::vector<Bounds>& bounds) {
  HeadBatch hb = head_forward(mu.transpose(), log_sigma.transpose(), noise.transpose(), bounds);
  GaussianSample s;
  s.u = hb.u.row(0).transpose();
  s.mu = mu;
  s.sigma = hb.sigma.row(0).transpose();
  s.output = hb.output.row(0).transpose();
  s.log_prob = hb.log_prob(0);
  return s;
}

void head_backward(const HeadBatch& hb, const Eigen::VectorXd& dlogp,
                   const Eigen::MatrixXd& doutput, const std::vector<Bounds>& bounds,
                   Eigen::MatrixXd& dmu, Eigen::MatrixXd& dlog_sigma) {
  const auto rows = hb.mu.rows();
  const auto dims = hb.mu.cols();
  dmu.resize(rows, dims);
  dlog_sigma.resize(rows, dims);
  for (Eigen::Index d = 0; d < dims; ++d) {
    const double scale = 0.5 * (bounds[d].hi - bounds[d].lo);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double t = hb.t(r, d);
      const double sech2 = 1.0 - t * t;
      // d log_prob / d u: only the squash correction depends on u
      const double dlogp_du = 2.0 * t * sech2 / (sech2 + kSquashEps);
      // d output / d u
      const double dout_du = scale * sech2;
      const double g_u = dlogp(r) * dlogp_du + doutput(r, d) * dout_du;
      dmu(r, d) = g_u;
      // through sigma: u = mu + exp(ls) * eps, plus the direct -1 from the
      // normal log-density; both vanish outside the clamp range
      const bool inside = hb.log_sigma_clamped(r, d) > kLogSigmaMin &&
                          hb.log_sigma_clamped(r, d) < kLogSigmaMax;
      const double du_dls = hb.sigma(r, d) * hb.noise(r, d);
      dlog_sigma(r, d) = inside ? g_u * du_dls - dlogp(r) : 0.0;
    }
  }
}

}  // namespace lcbench::nn
