#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mixw2/assignment.hpp"
#include "mixw2/mixed.hpp"
#include "mixw2/rng.hpp"

namespace mixw2 {
namespace transport {

/// Equal-weight finite collection of mixed samples.
struct EmpiricalMeasure {
  std::vector<MixedSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
};

enum class CostKind { Hard, Surrogate };

/// n x n matrix of pairwise ground costs between two equal-size measures.
Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                            const MixedMetricConfig& cfg, CostKind kind = CostKind::Hard);

struct CouplingResult {
  double value = 0.0;               // (1/n) * sum of matched costs
  std::vector<int> assignment;      // lexicographically smallest optimum
};

/// Exact squared generalized W2 between equal-weight empirical measures:
/// minimum over permutations of the mean matched cost. If sizes differ and
/// an rng is supplied, the larger measure is uniformly subsampled without
/// replacement down to the smaller; otherwise a size mismatch throws.
CouplingResult exact_coupling_cost(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                   const MixedMetricConfig& cfg,
                                   CostKind kind = CostKind::Hard, Rng* rng = nullptr);

/// Classical 1D squared W2 under the lambda-weighted quadratic cost:
/// lambda * mean of squared differences in sorted order.
double sorted_1d_w2_sq(std::vector<double> a, std::vector<double> b, double lambda);

/// Total-variation style lower bound term: 1 - sum_k min(pa_k, pb_k) for two
/// probability vectors over the same support.
double categorical_min_overlap(const Eigen::VectorXd& pa, const Eigen::VectorXd& pb);

/// Slack of the marginal lower bound: W2hat^2(a, b) minus the weighted W2^2
/// of the continuous marginals plus the per-slot overlap terms. Nonnegative
/// up to solver tolerance.
double lower_bound_gap(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                       const MixedMetricConfig& cfg);

/// Entropic-regularized transport cost (log-domain Sinkhorn). Approximation
/// only; never used in the training path. Throws if the marginal residual
/// still exceeds tol after max_iters.
double sinkhorn_cost(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                     const MixedMetricConfig& cfg, double eps, int max_iters = 10000,
                     double tol = 1e-9);

}  // namespace transport
}  // namespace mixw2
