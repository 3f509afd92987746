#include "mixw2/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mixw2/parallel.hpp"

namespace mixw2 {
namespace dynamics {

void ToggleParams::validate() const {
  for (double k : {k1, k2, k3, k4, k5, k6, k7, k8, k9})
    if (k <= 0.0) throw std::invalid_argument("ToggleParams: rates must be > 0");
  if (time_scale <= 0.0) throw std::invalid_argument("ToggleParams: time_scale must be > 0");
}

DerivedScales derived_scales(const ToggleParams& p) {
  p.validate();
  DerivedScales s;
  s.M0 = p.k3 / p.k8;
  s.P0 = p.k3 * p.k5 / (p.k8 * p.k9);
  const double k8k9 = p.k8 * p.k9;
  s.D0 = p.k6 * (p.k3 * p.k5) * (p.k3 * p.k5) / (p.k7 * k8k9 * k8k9);
  return s;
}

Eigen::Matrix<double, 6, 1> toggle_rhs(const ToggleState& s, const ToggleParams& p) {
  const DerivedScales sc = derived_scales(p);
  const double ts = p.time_scale;
  Eigen::Matrix<double, 6, 1> out;
  for (int i = 0; i < 2; ++i) {
    const double theta = i == 0 ? p.theta1 : p.theta2;
    const double g = static_cast<double>(s.g(i));
    const double m = s.m(i), pr = s.p(i), di = s.d(i);
    out[3 * i + 0] = ts * (p.k8 * g + (p.k4 / sc.M0) * (1.0 - g) - p.k8 * m);
    out[3 * i + 1] = ts * (2.0 * theta * p.k6 * sc.P0 * (di - pr * pr) + p.k9 * (m - pr));
    out[3 * i + 2] = ts * (theta * p.k7 * (pr * pr - di));
  }
  return out;
}

void jump_step(ToggleState& s, double dt, const ToggleParams& p, Rng& rng) {
  const DerivedScales sc = derived_scales(p);
  const double ts = p.time_scale;
  int next[2] = {s.g1, s.g2};
  for (int i = 0; i < 2; ++i) {
    const double sigma = i == 0 ? p.sigma1 : p.sigma2;
    const double d_other = s.d(1 - i);
    double prob;
    if (s.g(i) == 0) {
      prob = sigma * p.k1 * ts * dt;
    } else {
      prob = sigma * p.k2 * ts * sc.D0 * d_other * dt;
    }
    if (prob < 0.0 || prob > 1.0)
      throw std::runtime_error("jump_step: transition probability " + std::to_string(prob) +
                               " outside [0,1]; reduce dt");
    if (rng.bernoulli(prob)) next[i] = 1 - s.g(i);
  }
  s.g1 = next[0];
  s.g2 = next[1];
}

ToggleState sample_initial(Rng& rng) {
  ToggleState s;
  for (int i = 0; i < 2; ++i) {
    s.levels[3 * i + 0] = 0.15 * (1.0 + rng.uniform(0.0, 0.05));
    s.levels[3 * i + 1] = 0.15 * (1.0 + rng.uniform(0.0, 0.05));
    s.levels[3 * i + 2] = 0.022 * (1.0 + rng.uniform(0.0, 0.05));
  }
  s.g1 = rng.bernoulli(0.5) ? 1 : 0;
  s.g2 = rng.bernoulli(0.5) ? 1 : 0;
  return s;
}

namespace {

void rk4_levels(ToggleState& s, const ToggleParams& p, double dt, int substeps) {
  const double h = dt / substeps;
  for (int k = 0; k < substeps; ++k) {
    ToggleState tmp = s;
    const auto k1 = toggle_rhs(s, p);
    tmp.levels = s.levels + 0.5 * h * k1;
    const auto k2 = toggle_rhs(tmp, p);
    tmp.levels = s.levels + 0.5 * h * k2;
    const auto k3 = toggle_rhs(tmp, p);
    tmp.levels = s.levels + h * k3;
    const auto k4 = toggle_rhs(tmp, p);
    s.levels += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

}  // namespace

TrajectoryBundle simulate(const ToggleParams& p, int n_traj, double dt, int substeps,
                          int steps, Rng& rng, int threads) {
  p.validate();
  if (n_traj < 0 || dt <= 0.0 || substeps < 1 || steps < 1)
    throw std::invalid_argument("simulate: bad grid arguments");
  TrajectoryBundle b;
  b.dt = dt;
  b.steps = steps;
  b.traj.resize(n_traj);
  parallel_for(n_traj, threads, [&](int tr) {
    Rng local = rng.stream(0x51u, static_cast<std::uint64_t>(tr));
    ToggleState s = sample_initial(local);
    auto& path = b.traj[tr];
    path.reserve(steps + 1);
    path.push_back(s);
    for (int j = 0; j < steps; ++j) {
      rk4_levels(s, p, dt, substeps);
      jump_step(s, dt, p, local);
      path.push_back(s);
    }
  });
  return b;
}

void write_bundle_csv(const std::string& path, const TrajectoryBundle& b) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_bundle_csv: cannot open " + path);
  out << "traj_id,t,m1,p1,d1,m2,p2,d2,g1,g2\n";
  char buf[32];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (int tr = 0; tr < b.size(); ++tr) {
    for (int j = 0; j <= b.steps; ++j) {
      const ToggleState& s = b.traj[tr][j];
      out << tr << "," << fmt(j * b.dt);
      for (int k = 0; k < 6; ++k) out << "," << fmt(s.levels[k]);
      out << "," << s.g1 << "," << s.g2 << "\n";
    }
  }
}

TrajectoryBundle load_bundle_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_bundle_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_bundle_csv: empty file " + path);
  TrajectoryBundle b;
  b.traj.clear();
  int lineno = 1;
  double t_prev = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
    if (vals.size() != 10)
      throw std::runtime_error("load_bundle_csv: " + path + ":" + std::to_string(lineno) +
                               ": expected 10 columns");
    const int tr = static_cast<int>(vals[0]);
    if (tr == static_cast<int>(b.traj.size())) b.traj.emplace_back();
    if (tr != static_cast<int>(b.traj.size()) - 1)
      throw std::runtime_error("load_bundle_csv: trajectory ids must be contiguous");
    ToggleState s;
    for (int k = 0; k < 6; ++k) s.levels[k] = vals[2 + k];
    s.g1 = static_cast<int>(vals[8]);
    s.g2 = static_cast<int>(vals[9]);
    if (b.traj[tr].size() == 1 && b.traj.size() == 1) b.dt = vals[1] - t_prev;
    t_prev = vals[1];
    b.traj[tr].push_back(s);
  }
  if (b.traj.empty()) throw std::runtime_error("load_bundle_csv: no trajectories");
  b.steps = static_cast<int>(b.traj.front().size()) - 1;
  for (const auto& path_states : b.traj)
    if (static_cast<int>(path_states.size()) != b.steps + 1)
      throw std::runtime_error("load_bundle_csv: ragged trajectory grid");
  return b;
}

MLPParams init_mlp(int in_dim, int out_dim, int hidden_layers, int width, Rng& rng,
                   double init_std) {
  if (in_dim < 1 || out_dim < 1 || hidden_layers < 1 || width < 1)
    throw std::invalid_argument("init_mlp: bad architecture");
  MLPParams p;
  for (int l = 0; l <= hidden_layers; ++l) {
    const int rows = l < hidden_layers ? width : out_dim;
    const int cols = l == 0 ? in_dim : width;
    Eigen::MatrixXd w(rows, cols);
    Eigen::VectorXd b(rows);
    for (int k = 0; k < w.size(); ++k) w.data()[k] = rng.normal(0.0, init_std);
    for (int k = 0; k < rows; ++k) b[k] = rng.normal(0.0, init_std);
    p.w.push_back(std::move(w));
    p.b.push_back(std::move(b));
  }
  return p;
}

MLPVars make_vars(Tape& tape, const MLPParams& p) {
  MLPVars v;
  for (std::size_t l = 0; l < p.w.size(); ++l) {
    v.w.push_back(tape.leaf(p.w[l]));
    v.b.push_back(tape.leaf(p.b[l]));
  }
  return v;
}

Var mlp_forward(Tape& tape, const MLPVars& vars, Var input) {
  Var h = input;
  for (std::size_t l = 0; l < vars.w.size(); ++l) {
    Var z = tape.add(tape.matmul(vars.w[l], h), vars.b[l]);
    h = (l + 1 < vars.w.size()) ? tape.relu(z) : z;
  }
  return h;
}

Eigen::VectorXd mlp_forward_value(const MLPParams& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < p.w.size(); ++l) {
    Eigen::VectorXd z = p.w[l] * h + p.b[l];
    h = (l + 1 < p.w.size()) ? z.cwiseMax(0.0).eval() : z;
  }
  return h;
}

ReconState neural_reconstruction_step(Tape& tape, const MLPVars& nn1,
                                      const snn::SNNVars& snn2,
                                      const snn::SNNArchitecture& arch2, ReconState s,
                                      double dt, int substeps, const snn::WeightDraw& draw) {
  if (substeps < 1) throw std::invalid_argument("neural_reconstruction_step: substeps >= 1");
  // gene increment from the start-of-interval state
  Var snn_in = tape.vstack({s.levels, s.genes, tape.scalar(dt)});
  Var g_next = tape.add(s.genes, forward(tape, snn2, arch2, snn_in, draw));

  Var y = s.levels;
  const double h = dt / substeps;
  for (int k = 0; k < substeps; ++k) {
    Var k1 = mlp_forward(tape, nn1, tape.vstack({y, s.genes}));
    Var k2 = mlp_forward(tape, nn1, tape.vstack({tape.add(y, tape.scale(k1, 0.5 * h)), s.genes}));
    Var k3 = mlp_forward(tape, nn1, tape.vstack({tape.add(y, tape.scale(k2, 0.5 * h)), s.genes}));
    Var k4 = mlp_forward(tape, nn1, tape.vstack({tape.add(y, tape.scale(k3, h)), s.genes}));
    Var incr = tape.add(tape.add(k1, k4), tape.scale(tape.add(k2, k3), 2.0));
    y = tape.add(y, tape.scale(incr, h / 6.0));
  }
  return ReconState{y, g_next};
}

TrajectoryBundle reconstruct_bundle(const MLPParams& nn1, const snn::SNNParams& snn2,
                                    const TrajectoryBundle& truth, int substeps, Rng& rng) {
  TrajectoryBundle out;
  out.dt = truth.dt;
  out.steps = truth.steps;
  out.traj.resize(truth.size());
  const double h = truth.dt / substeps;
  for (int tr = 0; tr < truth.size(); ++tr) {
    Rng local = rng.stream(0x52u, static_cast<std::uint64_t>(tr));
    Eigen::VectorXd y = truth.traj[tr][0].levels;
    Eigen::Vector2d g(static_cast<double>(truth.traj[tr][0].g1),
                      static_cast<double>(truth.traj[tr][0].g2));
    auto& path = out.traj[tr];
    path.push_back(truth.traj[tr][0]);
    for (int j = 0; j < truth.steps; ++j) {
      Eigen::VectorXd snn_in(9);
      snn_in << y, g, truth.dt;
      const Eigen::VectorXd dg = snn::forward_value(snn2, snn_in, local);
      Eigen::Vector2d g_next = g + dg;
      for (int k = 0; k < substeps; ++k) {
        Eigen::VectorXd in1(8), in2(8), in3(8), in4(8);
        in1 << y, g;
        const Eigen::VectorXd k1 = mlp_forward_value(nn1, in1);
        in2 << (y + 0.5 * h * k1), g;
        const Eigen::VectorXd k2 = mlp_forward_value(nn1, in2);
        in3 << (y + 0.5 * h * k2), g;
        const Eigen::VectorXd k3 = mlp_forward_value(nn1, in3);
        in4 << (y + h * k3), g;
        const Eigen::VectorXd k4 = mlp_forward_value(nn1, in4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      g = g_next;
      ToggleState s;
      s.levels = y;
      s.g1 = clamp_round(g[0], 0, 1);
      s.g2 = clamp_round(g[1], 0, 1);
      path.push_back(s);
    }
  }
  return out;
}

std::pair<double, double> activated_fraction(const TrajectoryBundle& b, int time_index) {
  if (b.size() == 0) throw std::invalid_argument("activated_fraction: empty bundle");
  if (time_index < 0 || time_index > b.steps)
    throw std::invalid_argument("activated_fraction: time index out of range");
  double f1 = 0.0, f2 = 0.0;
  for (const auto& path : b.traj) {
    f1 += path[time_index].g1;
    f2 += path[time_index].g2;
  }
  return {f1 / b.size(), f2 / b.size()};
}

TransitionEstimates transition_prob_estimate(const TrajectoryBundle& b, int gene) {
  if (b.size() == 0) throw std::invalid_argument("transition_prob_estimate: empty bundle");
  if (gene != 0 && gene != 1) throw std::invalid_argument("transition_prob_estimate: gene must be 0 or 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  TransitionEstimates est;
  for (int j = 0; j < b.steps; ++j) {
    int n0 = 0, n1 = 0, c01 = 0, c10 = 0;
    for (const auto& path : b.traj) {
      const int from = path[j].g(gene);
      const int to = path[j + 1].g(gene);
      if (from == 0) {
        ++n0;
        if (to == 1) ++c01;
      } else {
        ++n1;
        if (to == 0) ++c10;
      }
    }
    est.p01.push_back(n0 ? static_cast<double>(c01) / n0 : nan);
    est.p00.push_back(n0 ? 1.0 - static_cast<double>(c01) / n0 : nan);
    est.p10.push_back(n1 ? static_cast<double>(c10) / n1 : nan);
    est.p11.push_back(n1 ? 1.0 - static_cast<double>(c10) / n1 : nan);
  }
  return est;
}

MixedSample state_to_sample(const ToggleState& s) {
  MixedSample out;
  out.cont = s.levels;
  out.cat.resize(2);
  out.cat[0] = s.g1;
  out.cat[1] = s.g2;
  return out;
}

double temporal_lambda(const TrajectoryBundle& b) {
  if (b.size() < 2) throw std::invalid_argument("temporal_lambda: need >= 2 trajectories");
  double total = 0.0;
  for (int j = 0; j <= b.steps; ++j) {
    for (int k = 0; k < 6; ++k) {
      double mean = 0.0;
      for (const auto& path : b.traj) mean += path[j].levels[k];
      mean /= b.size();
      double ss = 0.0;
      for (const auto& path : b.traj) {
        const double diff = path[j].levels[k] - mean;
        ss += diff * diff;
      }
      total += ss / (b.size() - 1);
    }
  }
  return std::max(total / (b.steps + 1), 1e-12);
}

}  // namespace dynamics
}  // namespace mixw2
