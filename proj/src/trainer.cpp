#include "mixw2/trainer.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "mixw2/assignment.hpp"
#include "mixw2/optim.hpp"

namespace mixw2 {
namespace trainer {

void TrainingConfig::validate(int n_samples) const {
  if (delta < 0.0) throw std::invalid_argument("TrainingConfig: delta must be >= 0");
  if (minibatch < 1 || minibatch > n_samples)
    throw std::invalid_argument("TrainingConfig: need 1 <= minibatch <= N");
  if (epoch_max < 0) throw std::invalid_argument("TrainingConfig: epoch_max must be >= 0");
  if (epoch_update < 0) throw std::invalid_argument("TrainingConfig: epoch_update must be >= 0");
  if (lr <= 0.0) throw std::invalid_argument("TrainingConfig: lr must be > 0");
  if (lambda <= 0.0) throw std::invalid_argument("TrainingConfig: lambda must be > 0");
  if (c <= 0.0) throw std::invalid_argument("TrainingConfig: c must be > 0");
}

Var local_w2_loss(Tape& tape, const snn::SNNVars& vars, const snn::SNNArchitecture& arch,
                  const data::Dataset& ds, const data::NeighborIndex& nbrs,
                  const std::vector<int>& batch, const MixedMetricConfig& metric,
                  Rng& draw_rng, const LossHooks& hooks) {
  if (batch.empty()) throw std::invalid_argument("local_w2_loss: empty minibatch");
  const int N = ds.size();

  // One independent draw per input for this epoch.
  std::vector<Var> preds(N);
  for (int i = 0; i < N; ++i) {
    if (hooks.draws) {
      preds[i] = snn::forward(tape, vars, arch, ds.X.row(i).transpose(), (*hooks.draws)[i]);
    } else {
      Rng stream = draw_rng.stream(static_cast<std::uint64_t>(i));
      preds[i] = snn::forward(tape, vars, arch, ds.X.row(i).transpose(), stream);
    }
  }

  Var total = tape.scalar(0.0);
  for (std::size_t bi = 0; bi < batch.size(); ++bi) {
    const std::vector<int>& ball = nbrs.ball[batch[bi]];
    const int nb = static_cast<int>(ball.size());
    if (nb == 0) throw std::logic_error("local_w2_loss: empty neighborhood");

    std::vector<int> sigma;
    if (hooks.assignments) {
      sigma = (*hooks.assignments)[bi];
    } else {
      Eigen::MatrixXd cost(nb, nb);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
          cost(i, j) =
              surrogate_cost_value(ds.Y[ball[i]], tape.value(preds[ball[j]]), metric);
      sigma = solve_assignment(cost).row_to_col;
    }
    if (hooks.out_assignments) hooks.out_assignments->push_back(sigma);

    Var ball_sum = tape.scalar(0.0);
    for (int i = 0; i < nb; ++i) {
      Var term = surrogate_cost_sq(tape, ds.Y[ball[i]], preds[ball[sigma[i]]], metric);
      ball_sum = tape.add(ball_sum, term);
    }
    total = tape.add(total, tape.scale(ball_sum, 1.0 / nb));
  }
  return tape.scale(total, 1.0 / static_cast<double>(batch.size()));
}

TrainResult train(const data::Dataset& ds, const snn::SNNArchitecture& arch,
                  const TrainingConfig& cfg) {
  cfg.validate(ds.size());
  const Rng master(cfg.seed);
  Rng init_rng = master.stream(0x11u);
  Rng batch_rng = master.stream(0x12u);

  MixedMetricConfig metric = ds.meta;
  metric.lambda = cfg.lambda;
  metric.c = cfg.c;
  metric.validate();

  const data::NeighborIndex nbrs = data::build_neighborhoods(ds.X, cfg.delta);

  TrainResult out;
  out.params = snn::init_params(arch, init_rng);
  snn::AdamState adam = snn::make_adam_state(out.params);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.weight_decay = cfg.weight_decay;

  std::vector<int> batch;
  for (int epoch = 0; epoch < cfg.epoch_max; ++epoch) {
    if (batch.empty() || (cfg.epoch_update > 0 && epoch % cfg.epoch_update == 0))
      batch = data::sample_minibatch(ds.size(), cfg.minibatch, batch_rng);

    Tape tape;
    snn::SNNVars vars = snn::make_vars(tape, out.params);
    Rng draw_rng = master.stream(0x13u, static_cast<std::uint64_t>(epoch));
    Var loss = local_w2_loss(tape, vars, arch, ds, nbrs, batch, metric, draw_rng);
    const double loss_value = tape.value_scalar(loss);
    out.loss_history.push_back(loss_value);
    if (!std::isfinite(loss_value)) {
      out.diverged = true;
      return out;
    }
    tape.backward(loss);
    snn::SNNGrads grads = snn::read_grads(tape, vars);
    snn::adam_step(out.params, grads, adam, adam_cfg);
  }
  return out;
}

std::vector<std::vector<int>> initial_condition_neighborhoods(
    const dynamics::TrajectoryBundle& truth, const MixedMetricConfig& metric,
    double delta) {
  const int n = truth.size();
  std::vector<MixedSample> initials;
  initials.reserve(n);
  for (const auto& path : truth.traj)
    initials.push_back(dynamics::state_to_sample(path.front()));
  std::vector<std::vector<int>> balls(n);
  const double d2 = delta * delta;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (mixed_dist_sq(initials[i], initials[j], metric) <= d2) balls[i].push_back(j);
  return balls;
}

Var temporal_local_w2_loss(Tape& tape, const dynamics::MLPVars& nn1,
                           const snn::SNNVars& snn2, const snn::SNNArchitecture& arch2,
                           const dynamics::TrajectoryBundle& truth,
                           const std::vector<std::vector<int>>& neighborhoods,
                           const std::vector<int>& batch, const MixedMetricConfig& metric,
                           int substeps, Rng& draw_rng, const TemporalLossHooks& hooks) {
  if (batch.empty()) throw std::invalid_argument("temporal_local_w2_loss: empty minibatch");
  const int n_traj = truth.size();
  const int T = truth.steps;

  // Taped rollout from every observed initial condition.
  // states[traj][j] for j = 1..T as stacked (levels, genes) prediction nodes.
  std::vector<std::vector<Var>> pred(n_traj);
  for (int tr = 0; tr < n_traj; ++tr) {
    const dynamics::ToggleState& s0 = truth.traj[tr][0];
    dynamics::ReconState s;
    s.levels = tape.constant(s0.levels);
    Eigen::Vector2d g0(static_cast<double>(s0.g1), static_cast<double>(s0.g2));
    s.genes = tape.constant(g0);
    pred[tr].reserve(T);
    for (int j = 0; j < T; ++j) {
      snn::WeightDraw draw;
      if (hooks.draws) {
        draw = (*hooks.draws)[tr][j];
      } else {
        Rng stream = draw_rng.stream(static_cast<std::uint64_t>(tr),
                                     static_cast<std::uint64_t>(j));
        draw = snn::draw_weights(arch2, stream);
      }
      s = dynamics::neural_reconstruction_step(tape, nn1, snn2, arch2, s, truth.dt,
                                               substeps, draw);
      pred[tr].push_back(tape.vstack({s.levels, s.genes}));
    }
  }

  // Neighborhood terms repeat across minibatch members with identical
  // balls, so solve each distinct (time, ball) once and weight by count.
  std::map<std::vector<int>, int> ball_count;
  for (int b : batch) ball_count[neighborhoods[b]] += 1;

  Var total = tape.scalar(0.0);
  for (int j = 1; j <= T; ++j) {
    for (const auto& [ball, count] : ball_count) {
      const int nb = static_cast<int>(ball.size());
      Eigen::MatrixXd cost(nb, nb);
      for (int a = 0; a < nb; ++a) {
        const MixedSample ya = dynamics::state_to_sample(truth.traj[ball[a]][j]);
        for (int b = 0; b < nb; ++b)
          cost(a, b) = surrogate_cost_value(ya, tape.value(pred[ball[b]][j - 1]), metric);
      }
      const std::vector<int> sigma = solve_assignment(cost).row_to_col;
      Var ball_sum = tape.scalar(0.0);
      for (int a = 0; a < nb; ++a) {
        const MixedSample ya = dynamics::state_to_sample(truth.traj[ball[a]][j]);
        ball_sum =
            tape.add(ball_sum, surrogate_cost_sq(tape, ya, pred[ball[sigma[a]]][j - 1], metric));
      }
      total = tape.add(total, tape.scale(ball_sum, static_cast<double>(count) / nb));
    }
  }
  return tape.scale(total, 1.0 / (static_cast<double>(T) * batch.size()));
}

TemporalTrainResult train_temporal(const dynamics::TrajectoryBundle& truth,
                                   const snn::SNNArchitecture& arch2,
                                   const TrainingConfig& cfg) {
  cfg.validate(truth.size());
  const Rng master(cfg.seed);
  Rng init_rng = master.stream(0x21u);
  Rng batch_rng = master.stream(0x22u);

  MixedMetricConfig metric;
  metric.d1 = 6;
  metric.d = 8;
  metric.cat_lo = 0;
  metric.cat_hi = 1;
  metric.lambda = cfg.lambda;
  metric.c = cfg.c;
  metric.validate();

  const auto neighborhoods = initial_condition_neighborhoods(truth, metric, cfg.delta);

  TemporalTrainResult out;
  out.nn1 = dynamics::init_mlp(8, 6, 3, 32, init_rng);
  out.snn2 = snn::init_params(arch2, init_rng);

  snn::AdamState snn_adam = snn::make_adam_state(out.snn2);
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  for (const auto& w : out.nn1.w) {
    m_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    v_w.push_back(m_w.back());
  }
  for (const auto& b : out.nn1.b) {
    m_b.push_back(Eigen::VectorXd::Zero(b.size()));
    v_b.push_back(m_b.back());
  }
  long mlp_step = 0;

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.weight_decay = cfg.weight_decay;

  std::vector<int> batch;
  for (int epoch = 0; epoch < cfg.epoch_max; ++epoch) {
    if (batch.empty() || (cfg.epoch_update > 0 && epoch % cfg.epoch_update == 0))
      batch = data::sample_minibatch(truth.size(), cfg.minibatch, batch_rng);

    Tape tape;
    dynamics::MLPVars nn1_vars = dynamics::make_vars(tape, out.nn1);
    snn::SNNVars snn2_vars = snn::make_vars(tape, out.snn2);
    Rng draw_rng = master.stream(0x23u, static_cast<std::uint64_t>(epoch));
    Var loss = temporal_local_w2_loss(tape, nn1_vars, snn2_vars, arch2, truth,
                                      neighborhoods, batch, metric, cfg.ode_substeps,
                                      draw_rng);
    const double loss_value = tape.value_scalar(loss);
    out.loss_history.push_back(loss_value);
    if (!std::isfinite(loss_value)) {
      out.diverged = true;
      return out;
    }
    tape.backward(loss);

    snn::SNNGrads g2 = snn::read_grads(tape, snn2_vars);
    snn::adam_step(out.snn2, g2, snn_adam, adam_cfg);
    ++mlp_step;
    for (std::size_t l = 0; l < out.nn1.w.size(); ++l) {
      const Eigen::MatrixXd gw = tape.adjoint(nn1_vars.w[l]);
      const Eigen::VectorXd gb = tape.adjoint(nn1_vars.b[l]);
      adam_update(out.nn1.w[l], gw, m_w[l], v_w[l], mlp_step, adam_cfg,
                  "nn1.w[" + std::to_string(l) + "]");
      adam_update(out.nn1.b[l], gb, m_b[l], v_b[l], mlp_step, adam_cfg,
                  "nn1.b[" + std::to_string(l) + "]");
    }
  }
  return out;
}

}  // namespace trainer
}  // namespace mixw2
