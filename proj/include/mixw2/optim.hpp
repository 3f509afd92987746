#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mixw2 {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

/// One Adam update for a single parameter block. `t` is the 1-based step
/// counter shared across blocks; `m` and `v` must be zero-initialized with
/// the block's shape. Weight decay is decoupled from the adaptive step.
template <class Mat>
void adam_update(Mat& param, const Mat& grad, Mat& m, Mat& v, long t,
                 const AdamConfig& cfg, const std::string& block_name) {
  if (!grad.allFinite())
    throw std::runtime_error("adam_update: nonfinite gradient in block " + block_name);
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  if (cfg.weight_decay != 0.0) param -= cfg.lr * cfg.weight_decay * param;
  param -= (cfg.lr / bc1) *
           (m.array() / ((v.array() / bc2).sqrt() + cfg.eps)).matrix();
}

}  // namespace mixw2
