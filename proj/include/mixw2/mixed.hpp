#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mixw2 {

/// One observation of a mixed random variable: d1 continuous components
/// followed by (d - d1) integer categorical components.
struct MixedSample {
  Eigen::VectorXd cont;
  Eigen::VectorXi cat;

  int dim() const { return static_cast<int>(cont.size() + cat.size()); }
};

/// Ground-cost configuration shared by the hard norm and its surrogate.
/// lambda weights the continuous block; c is the quadratic coefficient of
/// the categorical penalty (4 keeps the penalty continuous at |u| = 1/2).
struct MixedMetricConfig {
  int d1 = 0;
  int d = 1;
  double lambda = 1.0;
  double c = 4.0;
  int cat_lo = 0;
  int cat_hi = 1;

  int cat_dims() const { return d - d1; }

  void validate() const {
    if (d1 < 0 || d < 1 || d1 > d)
      throw std::invalid_argument("MixedMetricConfig: need 0 <= d1 <= d, d >= 1");
    if (lambda <= 0.0) throw std::invalid_argument("MixedMetricConfig: lambda must be > 0");
    if (c <= 0.0) throw std::invalid_argument("MixedMetricConfig: c must be > 0");
    if (cat_lo > cat_hi)
      throw std::invalid_argument("MixedMetricConfig: category bounds inverted");
  }
};

/// Relaxed Kronecker penalty: c*u^2 for |u| <= 1/2, else 1.
inline double hard_delta(double u, double c) {
  return std::abs(u) <= 0.5 ? c * u * u : 1.0;
}

/// Squared mixed norm of a d-component difference vector:
/// lambda * sum of squares over the first d1 slots plus the categorical
/// penalty over the rest.
inline double mixed_norm_sq(const Eigen::VectorXd& diff, const MixedMetricConfig& cfg) {
  if (diff.size() != cfg.d)
    throw std::invalid_argument("mixed_norm_sq: vector has " +
                                std::to_string(diff.size()) + " components, expected " +
                                std::to_string(cfg.d));
  double total = cfg.lambda * diff.head(cfg.d1).squaredNorm();
  for (int j = cfg.d1; j < cfg.d; ++j) total += hard_delta(diff[j], cfg.c);
  return total;
}

/// Embed a mixed sample as a plain d-vector (categories as doubles).
inline Eigen::VectorXd embed(const MixedSample& s) {
  Eigen::VectorXd v(s.dim());
  v.head(s.cont.size()) = s.cont;
  for (int j = 0; j < s.cat.size(); ++j) v[s.cont.size() + j] = s.cat[j];
  return v;
}

inline double mixed_dist_sq(const MixedSample& a, const MixedSample& b,
                            const MixedMetricConfig& cfg) {
  return mixed_norm_sq(embed(a) - embed(b), cfg);
}

/// Round half away from zero, then clip into [lo, hi].
inline int clamp_round(double v, int lo, int hi) {
  const double r = std::round(v);
  if (r <= lo) return lo;
  if (r >= hi) return hi;
  return static_cast<int>(r);
}

/// Default continuous weight: sum of per-component sample variances
/// (unbiased) of the continuous block. Falls back to 1 when there is no
/// continuous block, and floors at 1e-12 on degenerate data.
inline double default_lambda(const std::vector<MixedSample>& ys) {
  if (ys.empty()) throw std::invalid_argument("default_lambda: empty sample set");
  const int d1 = static_cast<int>(ys.front().cont.size());
  if (d1 == 0) return 1.0;
  const std::size_t n = ys.size();
  if (n < 2) throw std::invalid_argument("default_lambda: need at least 2 samples");
  double total = 0.0;
  for (int i = 0; i < d1; ++i) {
    double mean = 0.0;
    for (const auto& y : ys) mean += y.cont[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& y : ys) {
      const double diff = y.cont[i] - mean;
      ss += diff * diff;
    }
    total += ss / static_cast<double>(n - 1);
  }
  return std::max(total, 1e-12);
}

/// Value of the differentiable surrogate cost at plain doubles. Matches the
/// tape expression bit-for-bit so assignments solved on detached values stay
/// consistent with the loss terms built on the tape.
inline double surrogate_delta_value(int y, double yhat, double c) {
  const double u = static_cast<double>(y) - yhat;
  if (std::abs(u) <= 0.5) return c * u * u;
  const double k = std::abs(static_cast<double>(y) - std::round(yhat));
  constexpr double two_pi = 2.0 * M_PI;
  return 1.0 - std::cos(M_PI / 2.0 + two_pi * k) / two_pi;
}

inline double surrogate_cost_value(const MixedSample& y, const Eigen::VectorXd& yhat,
                                   const MixedMetricConfig& cfg) {
  if (yhat.size() != cfg.d)
    throw std::invalid_argument("surrogate_cost_value: prediction has " +
                                std::to_string(yhat.size()) + " components, expected " +
                                std::to_string(cfg.d));
  double total = cfg.lambda * (y.cont - yhat.head(cfg.d1)).squaredNorm();
  for (int j = 0; j < cfg.cat_dims(); ++j)
    total += surrogate_delta_value(y.cat[j], yhat[cfg.d1 + j], cfg.c);
  return total;
}

}  // namespace mixw2
