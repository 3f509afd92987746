#pragma once

#include <string>
#include <vector>

#include "mixw2/mixed.hpp"
#include "mixw2/optim.hpp"
#include "mixw2/rng.hpp"
#include "mixw2/tape.hpp"

namespace mixw2 {
namespace snn {

enum class Activation { Gelu, Relu, Elu, LeakyRelu };

Activation activation_from_string(const std::string& name);
std::string activation_to_string(Activation a);

/// Feedforward / residual stochastic network: hidden_layers activated layers
/// of the given width plus a linear output layer. Residual mode adds an
/// identity skip around every hidden layer after the first (the input and
/// output projections change width and are excluded).
struct SNNArchitecture {
  int input_dim = 1;
  int output_dim = 1;
  int hidden_layers = 5;
  int width = 32;
  Activation activation = Activation::Gelu;
  double activation_param = 1.0;  // elu alpha or leaky-relu slope
  bool residual = true;

  int layer_count() const { return hidden_layers + 1; }
  int layer_rows(int l) const { return l < hidden_layers ? width : output_dim; }
  int layer_cols(int l) const { return l == 0 ? input_dim : width; }
  void validate() const;
};

/// Trainable state: per-layer weight means, weight scale parameters
/// (effective sigma = |scale|), and deterministic biases.
struct SNNParams {
  SNNArchitecture arch;
  std::vector<Eigen::MatrixXd> mean;
  std::vector<Eigen::MatrixXd> scale;
  std::vector<Eigen::VectorXd> bias;
};

/// One realization of the per-layer standard-normal noise fixing
/// w = mean + |scale| .* eps.
struct WeightDraw {
  std::vector<Eigen::MatrixXd> eps;
};

/// All parameter blocks i.i.d. N(0, init_std^2).
SNNParams init_params(const SNNArchitecture& arch, Rng& rng, double init_std = 0.05);

WeightDraw draw_weights(const SNNArchitecture& arch, Rng& rng);

/// Plain-value forward pass (no gradients) with a fixed draw.
Eigen::VectorXd forward_value(const SNNParams& params, const Eigen::VectorXd& x,
                              const WeightDraw& draw);
/// Plain-value forward pass with a fresh independent draw.
Eigen::VectorXd forward_value(const SNNParams& params, const Eigen::VectorXd& x, Rng& rng);

/// Leaf nodes for the trainable blocks on a tape.
struct SNNVars {
  std::vector<Var> mean, scale, bias;
};
SNNVars make_vars(Tape& tape, const SNNParams& params);

/// Taped forward pass with a fixed draw; output is differentiable w.r.t.
/// the leaf blocks in `vars`.
Var forward(Tape& tape, const SNNVars& vars, const SNNArchitecture& arch, Var input,
            const WeightDraw& draw);
Var forward(Tape& tape, const SNNVars& vars, const SNNArchitecture& arch,
            const Eigen::VectorXd& x, const WeightDraw& draw);
Var forward(Tape& tape, const SNNVars& vars, const SNNArchitecture& arch,
            const Eigen::VectorXd& x, Rng& rng);

/// Value-only batch prediction, one independent draw per row of X.
std::vector<Eigen::VectorXd> forward_batch_values(const SNNParams& params,
                                                  const Eigen::MatrixXd& X, Rng& rng);

/// Repeated evaluation at one input: continuous slots averaged, categorical
/// slots clamp-rounded per draw then majority-voted. Ties go to the class
/// whose first occurrence among the repeats is earliest.
MixedSample predict_categorical(const SNNParams& params, const Eigen::VectorXd& x,
                                const MixedMetricConfig& cfg, int repeats, Rng& rng);

/// Gradients read off a tape after backward(), same block layout as params.
struct SNNGrads {
  std::vector<Eigen::MatrixXd> mean, scale;
  std::vector<Eigen::VectorXd> bias;
};
SNNGrads read_grads(const Tape& tape, const SNNVars& vars);

struct AdamState {
  std::vector<Eigen::MatrixXd> m_mean, v_mean, m_scale, v_scale;
  std::vector<Eigen::VectorXd> m_bias, v_bias;
  long step = 0;
};
AdamState make_adam_state(const SNNParams& params);

/// Adam with decoupled weight decay over every trainable block. Throws on
/// nonfinite gradients, naming the offending block.
void adam_step(SNNParams& params, const SNNGrads& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace snn
}  // namespace mixw2
