#include "mixw2/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mixw2/parallel.hpp"

namespace mixw2 {
namespace eval {

namespace {

// Pearson chi-square of a 2 x K table given per-group category counts.
double chisq_statistic(const std::vector<int>& count_a, const std::vector<int>& count_b,
                       int na, int nb) {
  const double n = na + nb;
  double stat = 0.0;
  for (std::size_t k = 0; k < count_a.size(); ++k) {
    const double col = count_a[k] + count_b[k];
    if (col == 0.0) continue;
    const double ea = col * na / n;
    const double eb = col * nb / n;
    if (ea > 0.0) stat += (count_a[k] - ea) * (count_a[k] - ea) / ea;
    if (eb > 0.0) stat += (count_b[k] - eb) * (count_b[k] - eb) / eb;
  }
  return stat;
}

}  // namespace

PermTestResult perm_chisq_test(const std::vector<int>& a, const std::vector<int>& b,
                               int B, Rng& rng) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("perm_chisq_test: empty sample");
  if (B < 99) throw std::invalid_argument("perm_chisq_test: need B >= 99");

  std::map<int, int> cat_index;
  for (int v : a) cat_index.emplace(v, 0);
  for (int v : b) cat_index.emplace(v, 0);
  int next = 0;
  for (auto& [cat, idx] : cat_index) idx = next++;
  const int K = next;

  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  std::vector<int> pooled;
  pooled.reserve(na + nb);
  for (int v : a) pooled.push_back(cat_index[v]);
  for (int v : b) pooled.push_back(cat_index[v]);

  std::vector<int> ca(K, 0), cb(K, 0);
  for (int i = 0; i < na; ++i) ca[pooled[i]] += 1;
  for (int i = 0; i < nb; ++i) cb[pooled[na + i]] += 1;
  const double observed = chisq_statistic(ca, cb, na, nb);

  int at_least = 0;
  std::vector<int> perm = pooled;
  for (int rep = 0; rep < B; ++rep) {
    rng.shuffle(perm);
    std::fill(ca.begin(), ca.end(), 0);
    std::fill(cb.begin(), cb.end(), 0);
    for (int i = 0; i < na; ++i) ca[perm[i]] += 1;
    for (int i = 0; i < nb; ++i) cb[perm[na + i]] += 1;
    if (chisq_statistic(ca, cb, na, nb) >= observed - 1e-12) ++at_least;
  }

  PermTestResult out;
  out.statistic = observed;
  out.permutations = B;
  out.p_value = (1.0 + at_least) / (1.0 + B);
  return out;
}

double rejection_rate(const snn::SNNParams& params, const std::vector<double>& grid,
                      const std::function<int(double, Rng&)>& truth_sampler,
                      const MixedMetricConfig& cfg, Rng& rng, int draws, int B,
                      double level, int threads) {
  if (grid.empty()) throw std::invalid_argument("rejection_rate: empty grid");
  if (cfg.d1 != 0 || cfg.d != 1)
    throw std::invalid_argument("rejection_rate: expects a single categorical target");
  std::vector<char> reject(grid.size(), 0);
  parallel_for(static_cast<int>(grid.size()), threads, [&](int gi) {
    Rng local = rng.stream(0x41u, static_cast<std::uint64_t>(gi));
    const double x = grid[gi];
    std::vector<int> truth(draws), predicted(draws);
    for (int r = 0; r < draws; ++r) truth[r] = truth_sampler(x, local);
    Eigen::VectorXd input(1);
    input[0] = x;
    for (int r = 0; r < draws; ++r) {
      const Eigen::VectorXd y = snn::forward_value(params, input, local);
      predicted[r] = clamp_round(y[0], cfg.cat_lo, cfg.cat_hi);
    }
    reject[gi] = perm_chisq_test(truth, predicted, B, local).p_value < level ? 1 : 0;
  });
  int rejected = 0;
  for (char r : reject) rejected += r;
  return static_cast<double>(rejected) / static_cast<double>(grid.size());
}

std::vector<double> example1_grid(int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = 0.01 * i - 0.1;
  return grid;
}

std::function<int(double, Rng&)> example1_sampler(double sigma) {
  static constexpr int kTable[5] = {3, 4, 1, 2, 0};
  return [sigma](double x, Rng& rng) {
    const double xi = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
    const int bucket = static_cast<int>(std::floor(4.0 * x + xi));
    return (bucket >= 0 && bucket < 5) ? kTable[bucket] : 5;
  };
}

double r_squared(const snn::SNNParams& params, const data::Dataset& test, Rng& rng,
                 int draws) {
  if (test.meta.d1 < 1)
    throw std::invalid_argument("r_squared: no continuous target");
  if (draws < 1) throw std::invalid_argument("r_squared: draws must be >= 1");
  const int n = test.size();
  double y_mean = 0.0;
  for (const auto& y : test.Y) y_mean += y.cont[0];
  y_mean /= n;

  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng local = rng.stream(0x42u, static_cast<std::uint64_t>(i));
    double pred_mean = 0.0;
    for (int r = 0; r < draws; ++r)
      pred_mean += snn::forward_value(params, test.X.row(i).transpose(), local)[0];
    pred_mean /= draws;
    ss_res += (test.Y[i].cont[0] - pred_mean) * (test.Y[i].cont[0] - pred_mean);
    ss_tot += (test.Y[i].cont[0] - y_mean) * (test.Y[i].cont[0] - y_mean);
  }
  if (ss_tot == 0.0) throw std::domain_error("r_squared: constant targets");
  return 1.0 - ss_res / ss_tot;
}

double scaled_pred_variance(const snn::SNNParams& params, const data::Dataset& test,
                            Rng& rng, int draws) {
  if (test.meta.d1 < 1)
    throw std::invalid_argument("scaled_pred_variance: no continuous target");
  if (draws < 2) throw std::invalid_argument("scaled_pred_variance: draws must be >= 2");
  const int n = test.size();
  double y_mean = 0.0;
  for (const auto& y : test.Y) y_mean += y.cont[0];
  y_mean /= n;

  double var_sum = 0.0, ss_tot = 0.0;
  std::vector<double> ys(draws);
  for (int i = 0; i < n; ++i) {
    Rng local = rng.stream(0x43u, static_cast<std::uint64_t>(i));
    double mean = 0.0;
    for (int r = 0; r < draws; ++r) {
      ys[r] = snn::forward_value(params, test.X.row(i).transpose(), local)[0];
      mean += ys[r];
    }
    mean /= draws;
    double ss = 0.0;
    for (int r = 0; r < draws; ++r) ss += (ys[r] - mean) * (ys[r] - mean);
    var_sum += ss / (draws - 1);
    ss_tot += (test.Y[i].cont[0] - y_mean) * (test.Y[i].cont[0] - y_mean);
  }
  if (ss_tot == 0.0) throw std::domain_error("scaled_pred_variance: constant targets");
  return (var_sum / n) / (ss_tot / n);
}

double classification_accuracy(const snn::SNNParams& params, const data::Dataset& test,
                               Rng& rng, int repeats) {
  if (test.meta.cat_dims() < 1)
    throw std::invalid_argument("classification_accuracy: no categorical target");
  const int n = test.size();
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    Rng local = rng.stream(0x44u, static_cast<std::uint64_t>(i));
    const MixedSample pred = snn::predict_categorical(params, test.X.row(i).transpose(),
                                                      test.meta, repeats, local);
    bool match = true;
    for (int j = 0; j < test.meta.cat_dims(); ++j)
      if (pred.cat[j] != test.Y[i].cat[j]) match = false;
    if (match) ++correct;
  }
  return static_cast<double>(correct) / n;
}

double h_bound(double N, int d) {
  if (N < 1.0 || d < 1) throw std::invalid_argument("h_bound: need N >= 1, d >= 1");
  if (d <= 4) return 2.0 * std::pow(N, -0.25) * std::sqrt(std::log(1.0 + N));
  return 2.0 * std::pow(N, -1.0 / d);
}

}  // namespace eval
}  // namespace mixw2
