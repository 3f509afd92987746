#include "mixw2/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mixw2 {
namespace transport {

namespace {

void check_measure(const EmpiricalMeasure& m, const MixedMetricConfig& cfg,
                   const char* name) {
  if (m.samples.empty())
    throw std::invalid_argument(std::string("transport: empty measure ") + name);
  for (const auto& s : m.samples)
    if (s.cont.size() != cfg.d1 || s.cat.size() != cfg.cat_dims())
      throw std::invalid_argument(std::string("transport: sample shape mismatch in ") + name);
}

EmpiricalMeasure subsample(const EmpiricalMeasure& m, int target, Rng& rng) {
  std::vector<int> idx(m.samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  rng.shuffle(idx);
  idx.resize(target);
  std::sort(idx.begin(), idx.end());
  EmpiricalMeasure out;
  out.samples.reserve(target);
  for (int i : idx) out.samples.push_back(m.samples[i]);
  return out;
}

}  // namespace

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                            const MixedMetricConfig& cfg, CostKind kind) {
  const int n = a.size();
  Eigen::MatrixXd c(n, b.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < b.size(); ++j) {
      c(i, j) = kind == CostKind::Hard
                    ? mixed_dist_sq(a.samples[i], b.samples[j], cfg)
                    : surrogate_cost_value(a.samples[i], embed(b.samples[j]), cfg);
    }
  }
  return c;
}

CouplingResult exact_coupling_cost(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                   const MixedMetricConfig& cfg, CostKind kind, Rng* rng) {
  check_measure(a, cfg, "A");
  check_measure(b, cfg, "B");
  if (a.size() != b.size()) {
    if (rng == nullptr)
      throw std::invalid_argument("exact_coupling_cost: measure sizes differ (" +
                                  std::to_string(a.size()) + " vs " +
                                  std::to_string(b.size()) + ") and no subsampling rng given");
    if (a.size() > b.size()) {
      EmpiricalMeasure as = subsample(a, b.size(), *rng);
      return exact_coupling_cost(as, b, cfg, kind, nullptr);
    }
    EmpiricalMeasure bs = subsample(b, a.size(), *rng);
    return exact_coupling_cost(a, bs, cfg, kind, nullptr);
  }
  const Eigen::MatrixXd c = cost_matrix(a, b, cfg, kind);
  AssignmentResult r = solve_assignment_lex(c);
  CouplingResult out;
  out.value = r.cost / static_cast<double>(a.size());
  out.assignment = std::move(r.row_to_col);
  return out;
}

double sorted_1d_w2_sq(std::vector<double> a, std::vector<double> b, double lambda) {
  if (a.size() != b.size())
    throw std::invalid_argument("sorted_1d_w2_sq: size mismatch");
  if (a.empty()) throw std::invalid_argument("sorted_1d_w2_sq: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    total += diff * diff;
  }
  return lambda * total / static_cast<double>(a.size());
}

double categorical_min_overlap(const Eigen::VectorXd& pa, const Eigen::VectorXd& pb) {
  if (pa.size() != pb.size())
    throw std::invalid_argument("categorical_min_overlap: support size mismatch");
  for (const auto* p : {&pa, &pb}) {
    if ((p->array() < -1e-12).any() || std::abs(p->sum() - 1.0) > 1e-9)
      throw std::invalid_argument("categorical_min_overlap: not a probability vector");
  }
  return 1.0 - pa.cwiseMin(pb).sum();
}

double lower_bound_gap(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                       const MixedMetricConfig& cfg) {
  check_measure(a, cfg, "A");
  check_measure(b, cfg, "B");
  if (a.size() != b.size())
    throw std::invalid_argument("lower_bound_gap: measure sizes differ");
  const int n = a.size();

  const double w2hat_sq = exact_coupling_cost(a, b, cfg).value;

  // Continuous marginals under the lambda-weighted quadratic cost.
  double w2_cont_sq = 0.0;
  if (cfg.d1 > 0) {
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        c(i, j) = cfg.lambda * (a.samples[i].cont - b.samples[j].cont).squaredNorm();
    w2_cont_sq = solve_assignment(c).cost / static_cast<double>(n);
  }

  // Per-slot categorical overlap over the union support.
  double overlap_total = 0.0;
  for (int slot = 0; slot < cfg.cat_dims(); ++slot) {
    std::map<int, std::pair<double, double>> freq;
    for (const auto& s : a.samples) freq[s.cat[slot]].first += 1.0;
    for (const auto& s : b.samples) freq[s.cat[slot]].second += 1.0;
    double overlap = 0.0;
    for (const auto& [cat, counts] : freq)
      overlap += std::min(counts.first, counts.second);
    overlap_total += 1.0 - overlap / static_cast<double>(n);
  }

  return w2hat_sq - (w2_cont_sq + overlap_total);
}

double sinkhorn_cost(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                     const MixedMetricConfig& cfg, double eps, int max_iters,
                     double tol) {
  if (eps <= 0.0) throw std::invalid_argument("sinkhorn_cost: eps must be > 0");
  check_measure(a, cfg, "A");
  check_measure(b, cfg, "B");
  if (a.size() != b.size())
    throw std::invalid_argument("sinkhorn_cost: measure sizes differ");
  const int n = a.size();
  const Eigen::MatrixXd c = cost_matrix(a, b, cfg, CostKind::Hard);

  // Log-domain scaling with uniform marginals.
  const double log_marg = -std::log(static_cast<double>(n));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n), g = Eigen::VectorXd::Zero(n);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i < n; ++i) {
      const Eigen::ArrayXd z = (g.array() - c.row(i).transpose().array()) / eps;
      const double m = z.maxCoeff();
      f[i] = eps * (log_marg - m - std::log((z - m).exp().sum()));
    }
    for (int j = 0; j < n; ++j) {
      const Eigen::ArrayXd z = (f.array() - c.col(j).array()) / eps;
      const double m = z.maxCoeff();
      g[j] = eps * (log_marg - m - std::log((z - m).exp().sum()));
    }
    // row marginals are exact after the f update; check columns
    residual = 0.0;
    for (int i = 0; i < n; ++i) {
      double row_mass = 0.0;
      for (int j = 0; j < n; ++j)
        row_mass += std::exp((f[i] + g[j] - c(i, j)) / eps);
      residual = std::max(residual, std::abs(row_mass - 1.0 / n));
    }
    if (residual < tol) {
      double cost = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          cost += std::exp((f[i] + g[j] - c(i, j)) / eps) * c(i, j);
      return cost;
    }
  }
  throw std::runtime_error("sinkhorn_cost: no convergence after " +
                           std::to_string(max_iters) +
                           " iterations (residual " + std::to_string(residual) + ")");
}

}  // namespace transport
}  // namespace mixw2
