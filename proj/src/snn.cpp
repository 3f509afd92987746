#include "mixw2/snn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mixw2 {
namespace snn {

Activation activation_from_string(const std::string& name) {
  if (name == "gelu") return Activation::Gelu;
  if (name == "relu") return Activation::Relu;
  if (name == "elu") return Activation::Elu;
  if (name == "leaky_relu") return Activation::LeakyRelu;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string activation_to_string(Activation a) {
  switch (a) {
    case Activation::Gelu: return "gelu";
    case Activation::Relu: return "relu";
    case Activation::Elu: return "elu";
    case Activation::LeakyRelu: return "leaky_relu";
  }
  return "gelu";
}

void SNNArchitecture::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("SNNArchitecture: dims must be >= 1");
  if (hidden_layers < 1) throw std::invalid_argument("SNNArchitecture: need >= 1 hidden layer");
  if (width < 1) throw std::invalid_argument("SNNArchitecture: width must be >= 1");
}

SNNParams init_params(const SNNArchitecture& arch, Rng& rng, double init_std) {
  arch.validate();
  if (init_std < 0.0) throw std::invalid_argument("init_params: init_std must be >= 0");
  SNNParams p;
  p.arch = arch;
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int r = arch.layer_rows(l), c = arch.layer_cols(l);
    Eigen::MatrixXd a(r, c), rho(r, c);
    Eigen::VectorXd b(r);
    for (int k = 0; k < r * c; ++k) a.data()[k] = rng.normal(0.0, init_std);
    for (int k = 0; k < r * c; ++k) rho.data()[k] = rng.normal(0.0, init_std);
    for (int k = 0; k < r; ++k) b[k] = rng.normal(0.0, init_std);
    p.mean.push_back(std::move(a));
    p.scale.push_back(std::move(rho));
    p.bias.push_back(std::move(b));
  }
  return p;
}

WeightDraw draw_weights(const SNNArchitecture& arch, Rng& rng) {
  WeightDraw d;
  d.eps.reserve(arch.layer_count());
  for (int l = 0; l < arch.layer_count(); ++l) {
    Eigen::MatrixXd e(arch.layer_rows(l), arch.layer_cols(l));
    for (int k = 0; k < e.size(); ++k) e.data()[k] = rng.normal();
    d.eps.push_back(std::move(e));
  }
  return d;
}

namespace {

Eigen::VectorXd apply_activation(const Eigen::VectorXd& z, const SNNArchitecture& arch) {
  switch (arch.activation) {
    case Activation::Gelu:
      return z.unaryExpr([](double x) { return x * 0.5 * std::erfc(-x * M_SQRT1_2); });
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Elu:
      return z.unaryExpr([a = arch.activation_param](double x) {
        return x > 0.0 ? x : a * (std::exp(x) - 1.0);
      });
    case Activation::LeakyRelu:
      return z.unaryExpr([s = arch.activation_param](double x) {
        return x > 0.0 ? x : s * x;
      });
  }
  return z;
}

Var apply_activation(Tape& t, Var z, const SNNArchitecture& arch) {
  switch (arch.activation) {
    case Activation::Gelu: return t.gelu(z);
    case Activation::Relu: return t.relu(z);
    case Activation::Elu: return t.elu(z, arch.activation_param);
    case Activation::LeakyRelu: return t.leaky_relu(z, arch.activation_param);
  }
  return z;
}

}  // namespace

Eigen::VectorXd forward_value(const SNNParams& params, const Eigen::VectorXd& x,
                              const WeightDraw& draw) {
  const SNNArchitecture& arch = params.arch;
  if (x.size() != arch.input_dim)
    throw std::invalid_argument("forward_value: input has " + std::to_string(x.size()) +
                                " components, expected " + std::to_string(arch.input_dim));
  Eigen::VectorXd h = x;
  for (int l = 0; l < arch.layer_count(); ++l) {
    const Eigen::MatrixXd w =
        params.mean[l] + params.scale[l].cwiseAbs().cwiseProduct(draw.eps[l]);
    Eigen::VectorXd z = w * h + params.bias[l];
    if (l == arch.layer_count() - 1) return z;
    Eigen::VectorXd a = apply_activation(z, arch);
    if (arch.residual && l > 0) a += h;
    h = std::move(a);
  }
  return h;
}

Eigen::VectorXd forward_value(const SNNParams& params, const Eigen::VectorXd& x, Rng& rng) {
  return forward_value(params, x, draw_weights(params.arch, rng));
}

SNNVars make_vars(Tape& tape, const SNNParams& params) {
  SNNVars v;
  for (std::size_t l = 0; l < params.mean.size(); ++l) {
    v.mean.push_back(tape.leaf(params.mean[l]));
    v.scale.push_back(tape.leaf(params.scale[l]));
    v.bias.push_back(tape.leaf(params.bias[l]));
  }
  return v;
}

Var forward(Tape& tape, const SNNVars& vars, const SNNArchitecture& arch, Var input,
            const WeightDraw& draw) {
  if (tape.value(input).rows() != arch.input_dim || tape.value(input).cols() != 1)
    throw std::invalid_argument("forward: input shape mismatch");
  Var h = input;
  for (int l = 0; l < arch.layer_count(); ++l) {
    Var w = tape.gaussian_weight(vars.mean[l], vars.scale[l], draw.eps[l]);
    Var z = tape.add(tape.matmul(w, h), vars.bias[l]);
    if (l == arch.layer_count() - 1) return z;
    Var a = apply_activation(tape, z, arch);
    h = (arch.residual && l > 0) ? tape.add(a, h) : a;
  }
  return h;
}

Var forward(Tape& tape, const SNNVars& vars, const SNNArchitecture& arch,
            const Eigen::VectorXd& x, const WeightDraw& draw) {
  return forward(tape, vars, arch, tape.constant(x), draw);
}

Var forward(Tape& tape, const SNNVars& vars, const SNNArchitecture& arch,
            const Eigen::VectorXd& x, Rng& rng) {
  return forward(tape, vars, arch, x, draw_weights(arch, rng));
}

std::vector<Eigen::VectorXd> forward_batch_values(const SNNParams& params,
                                                  const Eigen::MatrixXd& X, Rng& rng) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.push_back(forward_value(params, X.row(i).transpose(), rng));
  return out;
}

MixedSample predict_categorical(const SNNParams& params, const Eigen::VectorXd& x,
                                const MixedMetricConfig& cfg, int repeats, Rng& rng) {
  if (repeats < 1) throw std::invalid_argument("predict_categorical: repeats must be >= 1");
  const int dd = cfg.cat_dims();
  Eigen::VectorXd cont_sum = Eigen::VectorXd::Zero(cfg.d1);
  // per slot: category -> (count, first occurrence)
  std::vector<std::map<int, std::pair<int, int>>> votes(dd);
  for (int r = 0; r < repeats; ++r) {
    const Eigen::VectorXd y = forward_value(params, x, rng);
    cont_sum += y.head(cfg.d1);
    for (int j = 0; j < dd; ++j) {
      const int cat = clamp_round(y[cfg.d1 + j], cfg.cat_lo, cfg.cat_hi);
      auto it = votes[j].try_emplace(cat, std::pair<int, int>{0, r}).first;
      it->second.first += 1;
    }
  }
  MixedSample out;
  out.cont = cont_sum / static_cast<double>(repeats);
  out.cat.resize(dd);
  for (int j = 0; j < dd; ++j) {
    int best_cat = 0, best_count = -1, best_first = repeats;
    for (const auto& [cat, cf] : votes[j]) {
      if (cf.first > best_count ||
          (cf.first == best_count && cf.second < best_first)) {
        best_cat = cat;
        best_count = cf.first;
        best_first = cf.second;
      }
    }
    out.cat[j] = best_cat;
  }
  return out;
}

SNNGrads read_grads(const Tape& tape, const SNNVars& vars) {
  SNNGrads g;
  for (std::size_t l = 0; l < vars.mean.size(); ++l) {
    g.mean.push_back(tape.adjoint(vars.mean[l]));
    g.scale.push_back(tape.adjoint(vars.scale[l]));
    g.bias.push_back(tape.adjoint(vars.bias[l]));
  }
  return g;
}

AdamState make_adam_state(const SNNParams& params) {
  AdamState s;
  for (std::size_t l = 0; l < params.mean.size(); ++l) {
    s.m_mean.push_back(Eigen::MatrixXd::Zero(params.mean[l].rows(), params.mean[l].cols()));
    s.v_mean.push_back(s.m_mean.back());
    s.m_scale.push_back(s.m_mean.back());
    s.v_scale.push_back(s.m_mean.back());
    s.m_bias.push_back(Eigen::VectorXd::Zero(params.bias[l].size()));
    s.v_bias.push_back(s.m_bias.back());
  }
  return s;
}

void adam_step(SNNParams& params, const SNNGrads& grads, AdamState& state,
               const AdamConfig& cfg) {
  state.step += 1;
  for (std::size_t l = 0; l < params.mean.size(); ++l) {
    const std::string suffix = "[" + std::to_string(l) + "]";
    adam_update(params.mean[l], grads.mean[l], state.m_mean[l], state.v_mean[l],
                state.step, cfg, "mean" + suffix);
    adam_update(params.scale[l], grads.scale[l], state.m_scale[l], state.v_scale[l],
                state.step, cfg, "scale" + suffix);
    adam_update(params.bias[l], grads.bias[l], state.m_bias[l], state.v_bias[l],
                state.step, cfg, "bias" + suffix);
  }
}

}  // namespace snn
}  // namespace mixw2
