#pragma once

#include <string>
#include <vector>

#include "mixw2/mixed.hpp"
#include "mixw2/rng.hpp"
#include "mixw2/snn.hpp"
#include "mixw2/tape.hpp"

namespace mixw2 {
namespace dynamics {

/// Two-gene toggle rates. k1..k9 are stored in 1/s as tabulated;
/// time_scale converts them to the simulation unit (60 = minutes, so a
/// horizon of 1 min with dt = 0.1 is dimensionally consistent; set 1 to
/// keep seconds). sigma/theta are the per-gene multipliers.
struct ToggleParams {
  double k1 = 0.003;
  double k2 = 0.015;
  double k3 = 0.02;
  double k4 = 0.0006;
  double k5 = 0.01;
  double k6 = 1e-4;
  double k7 = 0.01;
  double k8 = 0.005;
  double k9 = 5e-4;
  double sigma1 = 1.0, sigma2 = 1.0;
  double theta1 = 1.0, theta2 = 1.0;
  double time_scale = 60.0;

  void validate() const;
};

struct DerivedScales {
  double M0, P0, D0;
};
/// M0 = k3/k8, P0 = k3 k5/(k8 k9), D0 = k6 (k3 k5)^2 / (k7 (k8 k9)^2).
/// Ratios of rates, so independent of time_scale.
DerivedScales derived_scales(const ToggleParams& p);

/// (m1, p1, d1, m2, p2, d2) scaled counts plus binary gene states.
struct ToggleState {
  Eigen::Matrix<double, 6, 1> levels = Eigen::Matrix<double, 6, 1>::Zero();
  int g1 = 0, g2 = 0;

  double m(int gene) const { return levels[3 * gene + 0]; }
  double p(int gene) const { return levels[3 * gene + 1]; }
  double d(int gene) const { return levels[3 * gene + 2]; }
  int g(int gene) const { return gene == 0 ? g1 : g2; }
};

/// ODE right-hand side with the gene states held fixed.
Eigen::Matrix<double, 6, 1> toggle_rhs(const ToggleState& s, const ToggleParams& p);

/// One Bernoulli transition per gene over dt: activation at rate sigma*k1,
/// repression at rate sigma*k2*D0 times the OTHER gene's dimer level.
/// Throws if either probability exceeds 1 for this dt.
void jump_step(ToggleState& s, double dt, const ToggleParams& p, Rng& rng);

/// Noisy fixed initial condition: levels 0.15/0.15/0.022 times (1 + U(0, 0.05))
/// per component, gene states uniform on {0, 1}.
ToggleState sample_initial(Rng& rng);

struct TrajectoryBundle {
  double dt = 0.1;
  int steps = 10;  // grid t_j = j*dt, j = 0..steps
  std::vector<std::vector<ToggleState>> traj;

  int size() const { return static_cast<int>(traj.size()); }
};

/// Alternate RK4 integration (substeps per jump interval, gene states
/// frozen) with per-interval Bernoulli jumps; states recorded on the grid.
TrajectoryBundle simulate(const ToggleParams& p, int n_traj, double dt, int substeps,
                          int steps, Rng& rng, int threads = 1);

void write_bundle_csv(const std::string& path, const TrajectoryBundle& b);
TrajectoryBundle load_bundle_csv(const std::string& path);

/// Deterministic MLP for the reconstructed ODE right-hand side.
struct MLPParams {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};
MLPParams init_mlp(int in_dim, int out_dim, int hidden_layers, int width, Rng& rng,
                   double init_std = 0.05);
struct MLPVars {
  std::vector<Var> w, b;
};
MLPVars make_vars(Tape& tape, const MLPParams& p);
Var mlp_forward(Tape& tape, const MLPVars& vars, Var input);  // ReLU hidden layers
Eigen::VectorXd mlp_forward_value(const MLPParams& p, const Eigen::VectorXd& x);

/// One reconstruction step on the tape: RK4 over [t, t+dt] for the six
/// continuous coordinates with the gene vector frozen, then the gene vector
/// incremented by the stochastic network's output. Gradients flow through
/// the whole step (discretize-then-optimize).
struct ReconState {
  Var levels;  // 6x1
  Var genes;   // 2x1, continuous during training
};
ReconState neural_reconstruction_step(Tape& tape, const MLPVars& nn1,
                                      const snn::SNNVars& snn2,
                                      const snn::SNNArchitecture& arch2, ReconState s,
                                      double dt, int substeps, const snn::WeightDraw& draw);

/// Value-only reconstruction rollout from the bundle's initial conditions.
/// Internally the gene vector stays continuous; recorded states carry
/// clamp-rounded genes.
TrajectoryBundle reconstruct_bundle(const MLPParams& nn1, const snn::SNNParams& snn2,
                                    const TrajectoryBundle& truth, int substeps, Rng& rng);

/// Fraction of trajectories with the gene active at a grid node.
std::pair<double, double> activated_fraction(const TrajectoryBundle& b, int time_index);

/// Empirical per-interval transition frequencies for one gene. Entries are
/// NaN where the conditioning state never occurs.
struct TransitionEstimates {
  std::vector<double> p00, p01, p10, p11;
};
TransitionEstimates transition_prob_estimate(const TrajectoryBundle& b, int gene);

/// Mixed-sample view of a recorded state: 6 continuous levels + 2 gene slots.
MixedSample state_to_sample(const ToggleState& s);

/// Time-averaged sum of per-component level variances across the bundle,
/// the default continuous weight for the temporal loss.
double temporal_lambda(const TrajectoryBundle& b);

}  // namespace dynamics
}  // namespace mixw2
