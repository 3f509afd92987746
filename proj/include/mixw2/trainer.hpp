#pragma once

#include <cstdint>
#include <vector>

#include "mixw2/data.hpp"
#include "mixw2/dynamics.hpp"
#include "mixw2/snn.hpp"
#include "mixw2/surrogate.hpp"

namespace mixw2 {
namespace trainer {

enum class LossMode { Static, Temporal };

struct TrainingConfig {
  double delta = 0.025;
  int minibatch = 100;
  int epoch_max = 3000;
  int epoch_update = 50;  // 0 = keep the first minibatch for the whole run
  double lr = 1e-3;
  double weight_decay = 0.01;
  double lambda = 1.0;
  double c = 4.0;
  std::uint64_t seed = 0;
  LossMode mode = LossMode::Static;
  int ode_substeps = 1;  // temporal mode: RK4 substeps per grid interval

  void validate(int n_samples) const;
};

/// Test hooks for gradient checks: frozen per-input draws and/or frozen
/// matchings. Production path leaves everything null.
struct LossHooks {
  const std::vector<snn::WeightDraw>* draws = nullptr;
  const std::vector<std::vector<int>>* assignments = nullptr;
  std::vector<std::vector<int>>* out_assignments = nullptr;
};

/// Minibatched generalized local squared W2 loss: one independent-draw
/// forward pass over all inputs, then for each minibatch center the
/// surrogate-cost matching between observed and predicted targets in its
/// neighborhood, averaged. The matching is solved on detached values and
/// held fixed in the gradient (envelope subgradient).
Var local_w2_loss(Tape& tape, const snn::SNNVars& vars, const snn::SNNArchitecture& arch,
                  const data::Dataset& ds, const data::NeighborIndex& nbrs,
                  const std::vector<int>& batch, const MixedMetricConfig& metric,
                  Rng& draw_rng, const LossHooks& hooks = {});

struct TrainResult {
  snn::SNNParams params;
  std::vector<double> loss_history;
  bool diverged = false;
};

/// Minibatched training of the stochastic network on a static dataset.
TrainResult train(const data::Dataset& ds, const snn::SNNArchitecture& arch,
                  const TrainingConfig& cfg);

/// Temporal variant: per grid time and per initial-condition neighborhood,
/// matched surrogate cost over the joint (levels, genes) vectors, averaged
/// over times and minibatch members. Predictions come from a taped
/// reconstruction rollout started at the observed initial conditions.
struct TemporalLossHooks {
  const std::vector<std::vector<snn::WeightDraw>>* draws = nullptr;  // [traj][step]
};
Var temporal_local_w2_loss(Tape& tape, const dynamics::MLPVars& nn1,
                           const snn::SNNVars& snn2, const snn::SNNArchitecture& arch2,
                           const dynamics::TrajectoryBundle& truth,
                           const std::vector<std::vector<int>>& neighborhoods,
                           const std::vector<int>& batch, const MixedMetricConfig& metric,
                           int substeps, Rng& draw_rng,
                           const TemporalLossHooks& hooks = {});

/// Neighborhoods of the bundle's initial conditions under the mixed norm.
std::vector<std::vector<int>> initial_condition_neighborhoods(
    const dynamics::TrajectoryBundle& truth, const MixedMetricConfig& metric, double delta);

struct TemporalTrainResult {
  dynamics::MLPParams nn1;
  snn::SNNParams snn2;
  std::vector<double> loss_history;
  bool diverged = false;
};

/// Joint training of the reconstruction networks with the temporal loss.
TemporalTrainResult train_temporal(const dynamics::TrajectoryBundle& truth,
                                   const snn::SNNArchitecture& arch2,
                                   const TrainingConfig& cfg);

}  // namespace trainer
}  // namespace mixw2
