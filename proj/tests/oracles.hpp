#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they check.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "mixw2/mixed.hpp"
#include "mixw2/rng.hpp"

namespace oracles {

/// Exhaustive minimum over all n! permutations (n <= 8).
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Central finite difference with step h.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline mixw2::MixedSample random_mixed_sample(int d1, int dd, int cat_lo, int cat_hi,
                                              mixw2::Rng& rng) {
  mixw2::MixedSample s;
  s.cont.resize(d1);
  for (int i = 0; i < d1; ++i) s.cont[i] = rng.uniform(-2.0, 2.0);
  s.cat.resize(dd);
  for (int j = 0; j < dd; ++j)
    s.cat[j] = cat_lo + static_cast<int>(rng.uniform_index(cat_hi - cat_lo + 1));
  return s;
}

inline std::vector<mixw2::MixedSample> random_mixed_measure(int n, int d1, int dd,
                                                            int cat_lo, int cat_hi,
                                                            mixw2::Rng& rng) {
  std::vector<mixw2::MixedSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(random_mixed_sample(d1, dd, cat_lo, cat_hi, rng));
  return out;
}

/// Independent plain-loop forward pass of the stochastic network semantics:
/// w = mean + |scale| .* eps per layer, activation on hidden layers, identity
/// skip around hidden layers after the first when residual is set.
struct PlainNet {
  std::vector<Eigen::MatrixXd> mean, scale;
  std::vector<Eigen::VectorXd> bias;
  bool residual = true;
  std::function<double(double)> act;

  Eigen::VectorXd forward(const Eigen::VectorXd& x,
                          const std::vector<Eigen::MatrixXd>& eps) const {
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l < mean.size(); ++l) {
      Eigen::MatrixXd w = mean[l];
      for (Eigen::Index k = 0; k < w.size(); ++k)
        w.data()[k] += std::abs(scale[l].data()[k]) * eps[l].data()[k];
      Eigen::VectorXd z = w * h + bias[l];
      if (l + 1 == mean.size()) return z;
      Eigen::VectorXd a = z.unaryExpr(act);
      if (residual && l > 0) a += h;
      h = a;
    }
    return h;
  }
};

inline double gelu_ref(double x) { return x * 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace oracles
