#pragma once

#include <functional>
#include <vector>

#include "mixw2/data.hpp"
#include "mixw2/rng.hpp"
#include "mixw2/snn.hpp"

namespace mixw2 {
namespace eval {

struct PermTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int permutations = 0;
};

/// Two-sample permutation chi-square test over the union of observed
/// categories. Add-one p-value estimator, so p >= 1/(B+1); zero-expected
/// cells drop from the statistic.
PermTestResult perm_chisq_test(const std::vector<int>& a, const std::vector<int>& b,
                               int B, Rng& rng);

/// Fraction of grid points where the permutation test rejects at `level`:
/// at each x, `draws` samples from the truth process against `draws`
/// clamp-rounded network outputs.
double rejection_rate(const snn::SNNParams& params, const std::vector<double>& grid,
                      const std::function<int(double, Rng&)>& truth_sampler,
                      const MixedMetricConfig& cfg, Rng& rng, int draws = 100,
                      int B = 1000, double level = 0.05, int threads = 1);

/// The evaluation grid of the step-function experiment: {0.01 i - 0.1}.
std::vector<double> example1_grid(int points = 120);

/// Truth sampler for the step-function experiment at noise level sigma.
std::function<int(double, Rng&)> example1_sampler(double sigma);

/// Proportion of variance in the first continuous target explained by the
/// mean of `draws` independent network evaluations.
double r_squared(const snn::SNNParams& params, const data::Dataset& test, Rng& rng,
                 int draws = 50);

/// Mean predictive variance of the first continuous target scaled by the
/// test variance of the truth. Needs draws >= 2.
double scaled_pred_variance(const snn::SNNParams& params, const data::Dataset& test,
                            Rng& rng, int draws = 50);

/// Majority-vote exact-match accuracy over all categorical slots.
double classification_accuracy(const snn::SNNParams& params, const data::Dataset& test,
                               Rng& rng, int repeats = 50);

/// Empirical-measure W2 convergence rate of the generalization bound:
/// 2 N^{-1/4} ln(1+N)^{1/2} for d <= 4, else 2 N^{-1/d}.
double h_bound(double N, int d);

}  // namespace eval
}  // namespace mixw2
