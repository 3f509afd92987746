#include "mixw2/cli.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixw2/checkpoint.hpp"
#include "mixw2/data.hpp"
#include "mixw2/dynamics.hpp"
#include "mixw2/eval.hpp"
#include "mixw2/trainer.hpp"
#include "mixw2/transport.hpp"

namespace mixw2 {
namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

/// Applies a JSON config under "flags win" precedence and rejects unknown
/// keys.
class ConfigBinder {
 public:
  template <class T>
  void bind(const std::string& key, CLI::Option* opt, T* target) {
    setters_[key] = [opt, target, key](const json& v) {
      if (opt->count() > 0) return;  // command line wins
      try {
        *target = v.get<T>();
      } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
      }
    };
  }

  void apply(const json& cfg) const {
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      auto it = setters_.find(key);
      if (it == setters_.end()) throw ConfigError("unknown config key '" + key + "'");
      it->second(value);
    }
  }

 private:
  std::map<std::string, std::function<void(const json&)>> setters_;
};

data::ColumnSchema abalone_schema() {
  data::ColumnSchema s;
  s.feature_cols = {1, 2, 3, 4, 5, 6, 7};
  s.cont_target_cols = {8};
  s.cat_target_cols = {0};
  s.has_header = false;
  return s;
}

struct MetricsWriter {
  std::vector<std::array<std::string, 3>> rows;

  void add(const std::string& metric, const std::string& name, double value) {
    rows.push_back({metric, name, fmt(value)});
  }
  void write(const std::string& csv_path, const std::string& json_path) const {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot open " + csv_path + " for writing");
    out << "metric,name,value\n";
    json summary = json::object();
    for (const auto& r : rows) {
      out << r[0] << "," << r[1] << "," << r[2] << "\n";
      summary[r[0] + ":" + r[1]] = std::stod(r[2]);
    }
    write_json(json_path, summary);
  }
};

void write_loss_csv(const std::string& path, const std::vector<double>& history) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "epoch,value\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out << i << "," << fmt(history[i]) << "\n";
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string preset, out;
  std::uint64_t seed = 0;
  int n = -1;
  double sigma = 0.4;
  int in_dim = 8, out_dim = 3;
  double avg_active = 2.0;
  int n_traj = 300, steps = 10, substeps = 10;
  double dt = 0.1;
  int threads = 1;
  dynamics::ToggleParams toggle;
};

int run_generate(const GenerateOptions& o) {
  Rng master(o.seed);
  json manifest;
  manifest["command"] = "generate";
  manifest["preset"] = o.preset;
  manifest["seed"] = o.seed;
  if (o.preset == "example1") {
    const int n = o.n > 0 ? o.n : 1000;
    Rng rng = master.stream(0x01u);
    data::write_csv(o.out, data::generate_example1(n, o.sigma, rng));
    manifest["n"] = n;
    manifest["sigma"] = o.sigma;
  } else if (o.preset == "multilabel") {
    const int n = o.n > 0 ? o.n : 5000;
    Rng rng = master.stream(0x02u);
    data::write_csv(o.out, data::generate_multilabel(n, o.in_dim, o.out_dim,
                                                     o.avg_active, rng));
    manifest["n"] = n;
    manifest["in_dim"] = o.in_dim;
    manifest["out_dim"] = o.out_dim;
    manifest["avg_active"] = o.avg_active;
  } else if (o.preset == "toggle") {
    Rng rng = master.stream(0x03u);
    dynamics::write_bundle_csv(
        o.out, dynamics::simulate(o.toggle, o.n_traj, o.dt, o.substeps, o.steps, rng,
                                  o.threads));
    manifest["n_traj"] = o.n_traj;
    manifest["dt"] = o.dt;
    manifest["steps"] = o.steps;
    manifest["substeps"] = o.substeps;
    manifest["time_scale"] = o.toggle.time_scale;
  } else {
    throw ConfigError("unknown preset '" + o.preset + "'");
  }
  write_json(o.out + ".manifest.json", manifest);
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string preset, data_path, out_dir, config_path;
  std::uint64_t seed = 0;
  int epochs = -1, epoch_update = -1, minibatch = -1;
  double lr = NAN, weight_decay = NAN, delta = NAN;
  double lambda = 0.0;  // 0 = preset rule
  double c = 4.0;
  int hidden_layers = -1, width = -1;
  std::string activation;
  double activation_param = 1.0;
  bool residual = true;
  double split_frac = 0.8;
  double sigma = 0.4;  // recorded for example1 evaluation
  int substeps = 1;
  int threads = 1;
};

struct PresetDefaults {
  int epochs, epoch_update, minibatch, width, hidden_layers;
  double lr, weight_decay, delta;
  bool split;
};

PresetDefaults preset_defaults(const std::string& preset) {
  if (preset == "example1")
    return {3000, 50, 100, 32, 5, 1e-3, 1e-2, 0.025, false};
  if (preset == "multilabel")
    return {2000, 50, 1000, 32, 5, 1e-2, 1e-4, 0.5 * std::sqrt(8.0), true};
  if (preset == "abalone")
    return {1000, 50, 300, 32, 5, 5e-3, 1e-4, 0.3 * std::sqrt(7.0), true};
  if (preset == "toggle")
    return {1000, 0, 300, 16, 5, 1e-2, 0.0, 0.02, false};
  throw ConfigError("unknown preset '" + preset + "'");
}

json config_echo(const TrainOptions& o) {
  json cfg;
  cfg["preset"] = o.preset;
  cfg["seed"] = o.seed;
  cfg["epochs"] = o.epochs;
  cfg["epoch_update"] = o.epoch_update;
  cfg["minibatch"] = o.minibatch;
  cfg["lr"] = o.lr;
  cfg["weight_decay"] = o.weight_decay;
  cfg["delta"] = o.delta;
  cfg["lambda"] = o.lambda;
  cfg["c"] = o.c;
  cfg["hidden_layers"] = o.hidden_layers;
  cfg["width"] = o.width;
  cfg["activation"] = o.activation;
  cfg["activation_param"] = o.activation_param;
  cfg["residual"] = o.residual;
  cfg["split_frac"] = o.split_frac;
  cfg["sigma"] = o.sigma;
  cfg["substeps"] = o.substeps;
  cfg["threads"] = o.threads;
  return cfg;
}

int run_train(TrainOptions o) {
  const PresetDefaults def = preset_defaults(o.preset);
  if (o.epochs < 0) o.epochs = def.epochs;
  if (o.epoch_update < 0) o.epoch_update = def.epoch_update;
  if (o.minibatch < 0) o.minibatch = def.minibatch;
  if (std::isnan(o.lr)) o.lr = def.lr;
  if (std::isnan(o.weight_decay)) o.weight_decay = def.weight_decay;
  if (std::isnan(o.delta)) o.delta = def.delta;
  if (o.hidden_layers < 0) o.hidden_layers = def.hidden_layers;
  if (o.width < 0) o.width = def.width;
  if (o.activation.empty()) o.activation = "gelu";

  fs::create_directories(o.out_dir);
  const std::string prefix = o.out_dir + "/";

  trainer::TrainingConfig tc;
  tc.delta = o.delta;
  tc.epoch_max = o.epochs;
  tc.epoch_update = o.epoch_update;
  tc.lr = o.lr;
  tc.weight_decay = o.weight_decay;
  tc.c = o.c;
  tc.seed = o.seed;

  json manifest;
  manifest["command"] = "train";
  manifest["preset"] = o.preset;
  manifest["data"] = fs::absolute(o.data_path).string();

  if (o.preset == "toggle") {
    const auto truth = dynamics::load_bundle_csv(o.data_path);
    tc.minibatch = std::min(o.minibatch, truth.size());
    tc.lambda = o.lambda > 0.0 ? o.lambda : dynamics::temporal_lambda(truth);
    tc.mode = trainer::LossMode::Temporal;
    tc.ode_substeps = o.substeps;

    snn::SNNArchitecture arch2;
    arch2.input_dim = 9;
    arch2.output_dim = 2;
    arch2.hidden_layers = o.hidden_layers;
    arch2.width = o.width;
    arch2.activation = snn::activation_from_string(o.activation);
    arch2.activation_param = o.activation_param;
    arch2.residual = o.residual;

    o.minibatch = tc.minibatch;
    o.lambda = tc.lambda;
    const json cfg = config_echo(o);
    manifest["config"] = cfg;
    manifest["n_train"] = truth.size();
    write_json(prefix + "config.json", cfg);

    const auto result = trainer::train_temporal(truth, arch2, tc);
    write_loss_csv(prefix + "loss.csv", result.loss_history);
    checkpoint::save_reconstruction(prefix + "checkpoint.json", result.nn1, result.snn2,
                                    tc.lambda);
    write_json(prefix + "manifest.json", manifest);
    if (result.diverged) throw std::domain_error("training diverged (nonfinite loss)");
    return 0;
  }

  // static presets
  data::Dataset full;
  if (o.preset == "abalone") {
    full = data::load_csv(o.data_path, abalone_schema());
  } else {
    full = data::load_csv(o.data_path, data::infer_schema(o.data_path));
  }
  if (o.preset == "multilabel") full = data::binary_encode_dataset(full);

  data::Dataset train_ds, test_ds;
  bool has_test = def.split;
  if (def.split) {
    Rng split_rng = Rng(o.seed).stream(0x05u);
    std::tie(train_ds, test_ds) = data::train_test_split(full, o.split_frac, split_rng);
  } else {
    train_ds = std::move(full);
  }
  if (o.preset == "abalone") {
    const auto stats = data::normalize_features(train_ds, has_test ? &test_ds : nullptr);
    manifest["normalization"]["mean"] =
        std::vector<double>(stats.mean.data(), stats.mean.data() + stats.mean.size());
    manifest["normalization"]["stddev"] =
        std::vector<double>(stats.stddev.data(), stats.stddev.data() + stats.stddev.size());
  }

  tc.minibatch = std::min(o.minibatch, train_ds.size());
  if (o.lambda > 0.0) {
    tc.lambda = o.lambda;
  } else {
    tc.lambda = train_ds.meta.d1 > 0 ? default_lambda(train_ds.Y) : 1.0;
  }

  snn::SNNArchitecture arch;
  arch.input_dim = train_ds.feature_dim();
  arch.output_dim = train_ds.meta.d;
  arch.hidden_layers = o.hidden_layers;
  arch.width = o.width;
  arch.activation = snn::activation_from_string(o.activation);
  arch.activation_param = o.activation_param;
  arch.residual = o.residual;

  o.minibatch = tc.minibatch;
  o.lambda = tc.lambda;
  const json cfg = config_echo(o);
  manifest["config"] = cfg;
  manifest["n_train"] = train_ds.size();
  manifest["n_test"] = has_test ? test_ds.size() : 0;
  manifest["label_names"] = train_ds.label_names;
  write_json(prefix + "config.json", cfg);

  if (has_test) data::write_csv(prefix + "test.csv", test_ds);

  const auto result = trainer::train(train_ds, arch, tc);
  write_loss_csv(prefix + "loss.csv", result.loss_history);
  checkpoint::save_snn(prefix + "checkpoint.json", result.params);
  write_json(prefix + "manifest.json", manifest);
  if (result.diverged) throw std::domain_error("training diverged (nonfinite loss)");
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string run_dir, out_dir;
  std::int64_t seed = -1;  // -1: reuse the training seed
  int draws = -1;
  int B = 1000;
  int threads = 1;
};

int run_eval(EvalOptions o) {
  if (o.out_dir.empty()) o.out_dir = o.run_dir;
  fs::create_directories(o.out_dir);
  const json manifest = read_json(o.run_dir + "/manifest.json");
  const std::string preset = manifest.at("preset").get<std::string>();
  const json cfg = manifest.at("config");
  const std::uint64_t seed =
      o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : cfg.at("seed").get<std::uint64_t>();
  Rng master(seed);
  Rng rng = master.stream(0x31u);

  MetricsWriter metrics;
  if (preset == "example1") {
    const auto params = checkpoint::load_snn(o.run_dir + "/checkpoint.json");
    MixedMetricConfig mc;
    mc.d1 = 0;
    mc.d = 1;
    mc.cat_lo = 0;
    mc.cat_hi = 5;
    const double sigma = cfg.at("sigma").get<double>();
    const int draws = o.draws > 0 ? o.draws : 100;
    const double rate =
        eval::rejection_rate(params, eval::example1_grid(), eval::example1_sampler(sigma),
                             mc, rng, draws, o.B, 0.05, o.threads);
    metrics.add("rejection_rate", preset, rate);
  } else if (preset == "multilabel" || preset == "abalone") {
    const auto params = checkpoint::load_snn(o.run_dir + "/checkpoint.json");
    const std::string test_path = o.run_dir + "/test.csv";
    data::Dataset test = data::load_csv(test_path, data::infer_schema(test_path));
    const int draws = o.draws > 0 ? o.draws : 50;
    metrics.add("accuracy", preset,
                eval::classification_accuracy(params, test, rng, draws));
    if (test.meta.d1 > 0) {
      metrics.add("r_squared", preset, eval::r_squared(params, test, rng, draws));
      metrics.add("scaled_pred_variance", preset,
                  eval::scaled_pred_variance(params, test, rng, draws));
    }
  } else if (preset == "toggle") {
    const auto ckpt = checkpoint::load_reconstruction(o.run_dir + "/checkpoint.json");
    const auto truth = dynamics::load_bundle_csv(manifest.at("data").get<std::string>());
    const int substeps = cfg.at("substeps").get<int>();
    const auto pred = dynamics::reconstruct_bundle(ckpt.nn1, ckpt.snn2, truth, substeps, rng);
    dynamics::write_bundle_csv(o.out_dir + "/predicted.csv", pred);
    const auto [t1, t2] = dynamics::activated_fraction(truth, truth.steps);
    const auto [p1, p2] = dynamics::activated_fraction(pred, pred.steps);
    metrics.add("activated_fraction_truth", "gene1", t1);
    metrics.add("activated_fraction_truth", "gene2", t2);
    metrics.add("activated_fraction_pred", "gene1", p1);
    metrics.add("activated_fraction_pred", "gene2", p2);
    metrics.add("activated_fraction_abs_error", "gene1", std::abs(t1 - p1));
    metrics.add("activated_fraction_abs_error", "gene2", std::abs(t2 - p2));
  } else {
    throw ConfigError("manifest has unknown preset '" + preset + "'");
  }
  metrics.write(o.out_dir + "/metrics.csv", o.out_dir + "/summary.json");
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string out;
  std::uint64_t seed = 0;
  int n_traj = 300, steps = 10, substeps = 10;
  double dt = 0.1;
  int threads = 1;
  dynamics::ToggleParams toggle;
};

int run_simulate(const SimulateOptions& o) {
  Rng master(o.seed);
  Rng rng = master.stream(0x03u);
  dynamics::write_bundle_csv(
      o.out, dynamics::simulate(o.toggle, o.n_traj, o.dt, o.substeps, o.steps, rng,
                                o.threads));
  json manifest;
  manifest["command"] = "simulate";
  manifest["seed"] = o.seed;
  manifest["n_traj"] = o.n_traj;
  manifest["dt"] = o.dt;
  manifest["steps"] = o.steps;
  manifest["substeps"] = o.substeps;
  manifest["time_scale"] = o.toggle.time_scale;
  write_json(o.out + ".manifest.json", manifest);
  return 0;
}

// ---------------------------------------------------------------------------
// distance

struct DistanceOptions {
  std::string path_a, path_b;
  double lambda = 0.0;  // 0 = variance rule
  double c = 4.0;
  std::uint64_t seed = 0;
  bool surrogate = false;
};

int run_distance(const DistanceOptions& o) {
  const auto load = [](const std::string& path) {
    return data::load_csv(path, data::infer_schema(path));
  };
  const data::Dataset da = load(o.path_a);
  const data::Dataset db = load(o.path_b);
  if (da.meta.d1 != db.meta.d1 || da.meta.d != db.meta.d)
    throw ConfigError("distance: sample files have different target shapes");

  transport::EmpiricalMeasure a{da.Y}, b{db.Y};
  MixedMetricConfig mc = da.meta;
  mc.c = o.c;
  mc.cat_lo = std::min(da.meta.cat_lo, db.meta.cat_lo);
  mc.cat_hi = std::max(da.meta.cat_hi, db.meta.cat_hi);
  if (o.lambda > 0.0) {
    mc.lambda = o.lambda;
  } else if (mc.d1 > 0) {
    std::vector<MixedSample> pooled = da.Y;
    pooled.insert(pooled.end(), db.Y.begin(), db.Y.end());
    mc.lambda = default_lambda(pooled);
  } else {
    mc.lambda = 1.0;
  }

  Rng rng = Rng(o.seed).stream(0x61u);
  const auto kind = o.surrogate ? transport::CostKind::Surrogate : transport::CostKind::Hard;
  const auto result = transport::exact_coupling_cost(a, b, mc, kind, &rng);
  std::printf("%.17g\n", result.value);
  return 0;
}

void add_toggle_rate_options(CLI::App* cmd, dynamics::ToggleParams* p) {
  cmd->add_option("--k1", p->k1, "gene activation rate (1/s)");
  cmd->add_option("--k2", p->k2, "gene repression rate (1/(mlcl*s))");
  cmd->add_option("--k3", p->k3, "transcription rate, active gene (1/s)");
  cmd->add_option("--k4", p->k4, "transcription rate, repressed gene (1/s)");
  cmd->add_option("--k5", p->k5, "translation rate (1/(mlcl*s))");
  cmd->add_option("--k6", p->k6, "dimer formation rate (1/(mlcl*s))");
  cmd->add_option("--k7", p->k7, "dimer dissociation rate (1/s)");
  cmd->add_option("--k8", p->k8, "mRNA degradation rate (1/s)");
  cmd->add_option("--k9", p->k9, "protein degradation rate (1/s)");
  cmd->add_option("--sigma1", p->sigma1, "gene 1 switch-rate multiplier");
  cmd->add_option("--sigma2", p->sigma2, "gene 2 switch-rate multiplier");
  cmd->add_option("--theta1", p->theta1, "gene 1 dimer-rate multiplier");
  cmd->add_option("--theta2", p->theta2, "gene 2 dimer-rate multiplier");
  cmd->add_option("--time-scale", p->time_scale,
                  "factor converting tabulated 1/s rates to grid time units");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"generalized local squared Wasserstein-2 training of stochastic networks"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* cgen = app.add_subcommand("generate", "write a synthetic dataset or trajectory bundle");
  cgen->add_option("--preset", gen.preset, "example1 | multilabel | toggle")->required();
  cgen->add_option("--out", gen.out, "output CSV path")->required();
  cgen->add_option("--seed", gen.seed, "master seed");
  cgen->add_option("--n", gen.n, "number of samples");
  cgen->add_option("--sigma", gen.sigma, "noise level of the step-function data");
  cgen->add_option("--in-dim", gen.in_dim, "multilabel feature dimension");
  cgen->add_option("--out-dim", gen.out_dim, "multilabel label count");
  cgen->add_option("--avg-active", gen.avg_active, "expected number of active labels");
  cgen->add_option("--n-traj", gen.n_traj, "number of trajectories");
  cgen->add_option("--dt", gen.dt, "grid interval");
  cgen->add_option("--steps", gen.steps, "grid steps");
  cgen->add_option("--substeps", gen.substeps, "RK4 substeps per grid interval");
  cgen->add_option("--threads", gen.threads, "worker cap");
  add_toggle_rate_options(cgen, &gen.toggle);

  TrainOptions tr;
  ConfigBinder tr_binder;
  auto* ctr = app.add_subcommand("train", "train a stochastic network");
  ctr->add_option("--preset", tr.preset, "example1 | multilabel | abalone | toggle")->required();
  ctr->add_option("--data", tr.data_path, "training CSV")->required()->check(CLI::ExistingFile);
  ctr->add_option("--out", tr.out_dir, "run directory")->required();
  ctr->add_option("--config", tr.config_path, "JSON config (flags win)")->check(CLI::ExistingFile);
  tr_binder.bind("seed", ctr->add_option("--seed", tr.seed, "master seed"), &tr.seed);
  tr_binder.bind("epochs", ctr->add_option("--epochs", tr.epochs, "training epochs"), &tr.epochs);
  tr_binder.bind("epoch_update",
                 ctr->add_option("--epoch-update", tr.epoch_update, "epochs per minibatch refresh"),
                 &tr.epoch_update);
  tr_binder.bind("minibatch", ctr->add_option("--minibatch", tr.minibatch, "minibatch size"),
                 &tr.minibatch);
  tr_binder.bind("lr", ctr->add_option("--lr", tr.lr, "learning rate"), &tr.lr);
  tr_binder.bind("weight_decay",
                 ctr->add_option("--weight-decay", tr.weight_decay, "decoupled weight decay"),
                 &tr.weight_decay);
  tr_binder.bind("delta", ctr->add_option("--delta", tr.delta, "neighborhood radius"), &tr.delta);
  tr_binder.bind("lambda", ctr->add_option("--lambda", tr.lambda, "continuous weight (0 = auto)"),
                 &tr.lambda);
  tr_binder.bind("c", ctr->add_option("--c", tr.c, "categorical quadratic coefficient"), &tr.c);
  tr_binder.bind("hidden_layers",
                 ctr->add_option("--hidden-layers", tr.hidden_layers, "hidden layer count"),
                 &tr.hidden_layers);
  tr_binder.bind("width", ctr->add_option("--width", tr.width, "hidden layer width"), &tr.width);
  tr_binder.bind("activation",
                 ctr->add_option("--activation", tr.activation, "gelu | relu | elu | leaky_relu"),
                 &tr.activation);
  tr_binder.bind("activation_param",
                 ctr->add_option("--activation-param", tr.activation_param,
                                 "elu alpha / leaky slope"),
                 &tr.activation_param);
  tr_binder.bind("residual",
                 ctr->add_flag("--residual,!--no-residual", tr.residual, "ResNet skips"),
                 &tr.residual);
  tr_binder.bind("split_frac",
                 ctr->add_option("--split-frac", tr.split_frac, "train fraction of the split"),
                 &tr.split_frac);
  tr_binder.bind("sigma",
                 ctr->add_option("--sigma", tr.sigma, "truth noise level (recorded for eval)"),
                 &tr.sigma);
  tr_binder.bind("substeps",
                 ctr->add_option("--substeps", tr.substeps, "reconstruction RK4 substeps"),
                 &tr.substeps);
  tr_binder.bind("threads", ctr->add_option("--threads", tr.threads, "worker cap"), &tr.threads);

  EvalOptions ev;
  auto* cev = app.add_subcommand("eval", "evaluate a training run");
  cev->add_option("--run", ev.run_dir, "training run directory")->required()->check(CLI::ExistingDirectory);
  cev->add_option("--out", ev.out_dir, "metrics output directory (default: run dir)");
  cev->add_option("--seed", ev.seed, "evaluation seed (default: training seed)");
  cev->add_option("--draws", ev.draws, "evaluations per test point");
  cev->add_option("--permutations", ev.B, "permutation count");
  cev->add_option("--threads", ev.threads, "worker cap");

  SimulateOptions sim;
  auto* csim = app.add_subcommand("simulate", "simulate the gene toggle system");
  csim->add_option("--out", sim.out, "trajectory CSV path")->required();
  csim->add_option("--seed", sim.seed, "master seed");
  csim->add_option("--n-traj", sim.n_traj, "number of trajectories");
  csim->add_option("--dt", sim.dt, "grid interval");
  csim->add_option("--steps", sim.steps, "grid steps");
  csim->add_option("--substeps", sim.substeps, "RK4 substeps per grid interval");
  csim->add_option("--threads", sim.threads, "worker cap");
  add_toggle_rate_options(csim, &sim.toggle);

  DistanceOptions dist;
  auto* cdist = app.add_subcommand("distance",
                                   "exact squared generalized W2 between two sample files");
  cdist->add_option("a", dist.path_a, "first sample CSV")->required()->check(CLI::ExistingFile);
  cdist->add_option("b", dist.path_b, "second sample CSV")->required()->check(CLI::ExistingFile);
  cdist->add_option("--lambda", dist.lambda, "continuous weight (0 = pooled variance)");
  cdist->add_option("--c", dist.c, "categorical quadratic coefficient");
  cdist->add_option("--seed", dist.seed, "seed for subsampling unequal sizes");
  cdist->add_flag("--surrogate", dist.surrogate, "use the surrogate cost");

  std::vector<const char*> argv;
  argv.push_back("mixw2");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (ctr->parsed() && !tr.config_path.empty()) tr_binder.apply(read_json(tr.config_path));
    if (cgen->parsed()) return run_generate(gen);
    if (ctr->parsed()) return run_train(tr);
    if (cev->parsed()) return run_eval(ev);
    if (csim->parsed()) return run_simulate(sim);
    if (cdist->parsed()) return run_distance(dist);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace cli
}  // namespace mixw2
