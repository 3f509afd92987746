#include "mixw2/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mixw2 {
namespace checkpoint {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data(m.size());
  for (Eigen::Index c = 0, k = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) data[k++] = m(r, c);
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::runtime_error("checkpoint: matrix payload size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0, k = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = data[k++];
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(),
                                           static_cast<Eigen::Index>(data.size()));
}

json arch_to_json(const snn::SNNArchitecture& a) {
  json j;
  j["input_dim"] = a.input_dim;
  j["output_dim"] = a.output_dim;
  j["hidden_layers"] = a.hidden_layers;
  j["width"] = a.width;
  j["activation"] = snn::activation_to_string(a.activation);
  j["activation_param"] = a.activation_param;
  j["residual"] = a.residual;
  return j;
}

snn::SNNArchitecture arch_from_json(const json& j) {
  snn::SNNArchitecture a;
  a.input_dim = j.at("input_dim").get<int>();
  a.output_dim = j.at("output_dim").get<int>();
  a.hidden_layers = j.at("hidden_layers").get<int>();
  a.width = j.at("width").get<int>();
  a.activation = snn::activation_from_string(j.at("activation").get<std::string>());
  a.activation_param = j.at("activation_param").get<double>();
  a.residual = j.at("residual").get<bool>();
  a.validate();
  return a;
}

json snn_to_json(const snn::SNNParams& p) {
  json j;
  j["architecture"] = arch_to_json(p.arch);
  for (std::size_t l = 0; l < p.mean.size(); ++l) {
    j["mean"].push_back(matrix_to_json(p.mean[l]));
    j["scale"].push_back(matrix_to_json(p.scale[l]));
    j["bias"].push_back(vector_to_json(p.bias[l]));
  }
  return j;
}

snn::SNNParams snn_from_json(const json& j) {
  snn::SNNParams p;
  p.arch = arch_from_json(j.at("architecture"));
  for (const auto& mj : j.at("mean")) p.mean.push_back(matrix_from_json(mj));
  for (const auto& sj : j.at("scale")) p.scale.push_back(matrix_from_json(sj));
  for (const auto& bj : j.at("bias")) p.bias.push_back(vector_from_json(bj));
  if (static_cast<int>(p.mean.size()) != p.arch.layer_count())
    throw std::runtime_error("checkpoint: layer count mismatch");
  return p;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

void save_snn(const std::string& path, const snn::SNNParams& params) {
  json j = snn_to_json(params);
  j["type"] = "snn";
  write_json_file(path, j);
}

snn::SNNParams load_snn(const std::string& path) {
  const json j = read_json_file(path);
  if (j.value("type", "") != "snn")
    throw std::runtime_error("checkpoint: " + path + " is not an snn checkpoint");
  return snn_from_json(j);
}

void save_reconstruction(const std::string& path, const dynamics::MLPParams& nn1,
                         const snn::SNNParams& snn2, double lambda) {
  json j;
  j["type"] = "toggle_reconstruction";
  j["lambda"] = lambda;
  for (std::size_t l = 0; l < nn1.w.size(); ++l) {
    j["nn1"]["w"].push_back(matrix_to_json(nn1.w[l]));
    j["nn1"]["b"].push_back(vector_to_json(nn1.b[l]));
  }
  j["snn2"] = snn_to_json(snn2);
  write_json_file(path, j);
}

ReconstructionCheckpoint load_reconstruction(const std::string& path) {
  const json j = read_json_file(path);
  if (j.value("type", "") != "toggle_reconstruction")
    throw std::runtime_error("checkpoint: " + path + " is not a reconstruction checkpoint");
  ReconstructionCheckpoint out;
  for (const auto& wj : j.at("nn1").at("w")) out.nn1.w.push_back(matrix_from_json(wj));
  for (const auto& bj : j.at("nn1").at("b")) out.nn1.b.push_back(vector_from_json(bj));
  out.snn2 = snn_from_json(j.at("snn2"));
  out.lambda = j.at("lambda").get<double>();
  return out;
}

}  // namespace checkpoint
}  // namespace mixw2
