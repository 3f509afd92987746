#include "mixw2/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mixw2 {
namespace data {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return false;
  out = static_cast<int>(v);
  return true;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_csv(const std::string& path, const ColumnSchema& schema,
                 const std::vector<std::vector<std::string>>* fixed_labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  const int n_feat = static_cast<int>(schema.feature_cols.size());
  const int d1 = static_cast<int>(schema.cont_target_cols.size());
  const int dd = static_cast<int>(schema.cat_target_cols.size());
  if (d1 + dd == 0) throw std::invalid_argument("load_csv: schema declares no targets");
  if (fixed_labels && static_cast<int>(fixed_labels->size()) != dd)
    throw std::invalid_argument("load_csv: label dictionary slot count mismatch");

  std::vector<Eigen::VectorXd> rows;
  std::vector<MixedSample> ys;
  std::vector<std::map<std::string, int>> dicts(dd);
  std::vector<std::vector<std::string>> names(dd);
  if (fixed_labels) {
    for (int j = 0; j < dd; ++j) {
      names[j] = (*fixed_labels)[j];
      for (std::size_t k = 0; k < names[j].size(); ++k)
        dicts[j][names[j][k]] = static_cast<int>(k);
    }
  }
  std::vector<char> slot_is_numeric(dd, 1);

  std::string line;
  int lineno = 0;
  bool header_skipped = !schema.has_header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    const auto fields = split_line(line);
    const auto field_at = [&](int col) -> const std::string& {
      if (col < 0 || col >= static_cast<int>(fields.size()))
        throw std::runtime_error("load_csv: " + path + ":" + std::to_string(lineno) +
                                 ": missing column " + std::to_string(col));
      return fields[col];
    };

    Eigen::VectorXd x(n_feat);
    for (int k = 0; k < n_feat; ++k) {
      if (!parse_double(field_at(schema.feature_cols[k]), x[k]))
        throw std::runtime_error("load_csv: " + path + ":" + std::to_string(lineno) +
                                 ": bad numeric field '" + field_at(schema.feature_cols[k]) + "'");
    }
    MixedSample y;
    y.cont.resize(d1);
    for (int k = 0; k < d1; ++k) {
      if (!parse_double(field_at(schema.cont_target_cols[k]), y.cont[k]))
        throw std::runtime_error("load_csv: " + path + ":" + std::to_string(lineno) +
                                 ": bad numeric field '" + field_at(schema.cont_target_cols[k]) + "'");
    }
    y.cat.resize(dd);
    for (int k = 0; k < dd; ++k) {
      const std::string& raw = field_at(schema.cat_target_cols[k]);
      int v = 0;
      if (!fixed_labels && parse_int(raw, v) && slot_is_numeric[k]) {
        y.cat[k] = v;
        continue;
      }
      if (!fixed_labels && slot_is_numeric[k] && !dicts[k].empty()) {
        // slot switched from numeric to labeled mid-file; reject for clarity
        throw std::runtime_error("load_csv: " + path + ":" + std::to_string(lineno) +
                                 ": mixed numeric and text labels in one column");
      }
      slot_is_numeric[k] = 0;
      auto it = dicts[k].find(raw);
      if (it == dicts[k].end()) {
        if (fixed_labels)
          throw std::runtime_error("load_csv: " + path + ":" + std::to_string(lineno) +
                                   ": unknown category '" + raw + "'");
        const int idx = static_cast<int>(dicts[k].size());
        it = dicts[k].emplace(raw, idx).first;
        names[k].push_back(raw);
      }
      y.cat[k] = it->second;
    }
    rows.push_back(std::move(x));
    ys.push_back(std::move(y));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: " + path + ": no data rows");

  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(rows.size()), n_feat);
  for (std::size_t i = 0; i < rows.size(); ++i) ds.X.row(static_cast<Eigen::Index>(i)) = rows[i];
  ds.Y = std::move(ys);
  ds.label_names = std::move(names);
  ds.meta.d1 = d1;
  ds.meta.d = d1 + dd;
  int lo = 0, hi = 0;
  bool first = true;
  for (const auto& y : ds.Y) {
    for (int k = 0; k < dd; ++k) {
      lo = first ? y.cat[k] : std::min(lo, y.cat[k]);
      hi = first ? y.cat[k] : std::max(hi, y.cat[k]);
      first = false;
    }
  }
  ds.meta.cat_lo = lo;
  ds.meta.cat_hi = hi;
  return ds;
}

void write_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  const int dd = ds.meta.cat_dims();
  for (int k = 0; k < ds.feature_dim(); ++k) out << (k ? "," : "") << "x" << k;
  for (int k = 0; k < ds.meta.d1; ++k) out << ",yc" << k;
  for (int k = 0; k < dd; ++k) out << ",yk" << k;
  out << "\n";
  for (int i = 0; i < ds.size(); ++i) {
    for (int k = 0; k < ds.feature_dim(); ++k)
      out << (k ? "," : "") << format_double(ds.X(i, k));
    for (int k = 0; k < ds.meta.d1; ++k) out << "," << format_double(ds.Y[i].cont[k]);
    for (int k = 0; k < dd; ++k) out << "," << ds.Y[i].cat[k];
    out << "\n";
  }
}

ColumnSchema infer_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("infer_schema: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("infer_schema: empty file " + path);
  ColumnSchema schema;
  schema.has_header = true;
  const auto fields = split_line(line);
  for (int col = 0; col < static_cast<int>(fields.size()); ++col) {
    const std::string& f = fields[col];
    if (f.rfind("yc", 0) == 0) schema.cont_target_cols.push_back(col);
    else if (f.rfind("yk", 0) == 0) schema.cat_target_cols.push_back(col);
    else if (f.rfind('x', 0) == 0) schema.feature_cols.push_back(col);
    else throw std::runtime_error("infer_schema: unrecognized column '" + f + "' in " + path);
  }
  return schema;
}

NormalizationStats normalize_features(Dataset& train, Dataset* test) {
  if (train.size() == 0) throw std::invalid_argument("normalize_features: empty train set");
  NormalizationStats s;
  s.mean = train.X.colwise().mean().transpose();
  s.stddev.resize(train.X.cols());
  for (Eigen::Index k = 0; k < train.X.cols(); ++k) {
    const double var = (train.X.col(k).array() - s.mean[k]).square().mean();
    s.stddev[k] = std::max(std::sqrt(var), 1e-12);
  }
  apply_normalization(train, s);
  if (test) apply_normalization(*test, s);
  return s;
}

void apply_normalization(Dataset& ds, const NormalizationStats& stats) {
  for (Eigen::Index k = 0; k < ds.X.cols(); ++k)
    ds.X.col(k) = (ds.X.col(k).array() - stats.mean[k]) / stats.stddev[k];
}

NeighborIndex build_neighborhoods(const Eigen::MatrixXd& X, double delta) {
  if (delta < 0.0) throw std::invalid_argument("build_neighborhoods: delta must be >= 0");
  const int n = static_cast<int>(X.rows());
  NeighborIndex idx;
  idx.delta = delta;
  idx.ball.resize(n);
  const double d2 = delta * delta;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((X.row(i) - X.row(j)).squaredNorm() <= d2) idx.ball[i].push_back(j);
    }
  }
  return idx;
}

std::vector<int> sample_minibatch(int N, int n, Rng& rng) {
  if (n < 1 || n > N) throw std::invalid_argument("sample_minibatch: need 1 <= n <= N");
  std::vector<int> idx(N);
  for (int i = 0; i < N; ++i) idx[i] = i;
  // partial Fisher-Yates: first n entries are a uniform sample
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(N - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Dataset generate_example1(int N, double sigma, Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("generate_example1: sigma must be >= 0");
  static constexpr int kTable[5] = {3, 4, 1, 2, 0};
  Dataset ds;
  ds.X.resize(N, 1);
  ds.Y.reserve(N);
  for (int i = 0; i < N; ++i) {
    const double x = rng.uniform(-0.1, 1.1);
    const double xi = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
    const int bucket = static_cast<int>(std::floor(4.0 * x + xi));
    const int label = (bucket >= 0 && bucket < 5) ? kTable[bucket] : 5;
    ds.X(i, 0) = x;
    MixedSample y;
    y.cont.resize(0);
    y.cat.resize(1);
    y.cat[0] = label;
    ds.Y.push_back(std::move(y));
  }
  ds.meta.d1 = 0;
  ds.meta.d = 1;
  ds.meta.cat_lo = 0;
  ds.meta.cat_hi = 5;
  ds.label_names.resize(1);
  return ds;
}

Dataset generate_multilabel(int N, int in_dim, int out_dim, double avg_active, Rng& rng) {
  if (N < 1 || in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("generate_multilabel: bad dimensions");
  const int n_clusters = 3;
  std::vector<Eigen::VectorXd> centers;
  for (int k = 0; k < n_clusters; ++k) {
    Eigen::VectorXd c(in_dim);
    for (int j = 0; j < in_dim; ++j) c[j] = rng.normal(0.0, 2.0);
    centers.push_back(std::move(c));
  }
  Eigen::MatrixXd W(out_dim, in_dim);
  for (int k = 0; k < W.size(); ++k)
    W.data()[k] = rng.normal() / std::sqrt(static_cast<double>(in_dim));

  Dataset ds;
  ds.X.resize(N, in_dim);
  for (int i = 0; i < N; ++i) {
    const auto& c = centers[rng.uniform_index(n_clusters)];
    for (int j = 0; j < in_dim; ++j) ds.X(i, j) = c[j] + rng.normal();
  }

  // Calibrate each label's bias so the mean activation matches the target.
  const double target = std::clamp(avg_active / out_dim, 0.0, 1.0);
  const Eigen::MatrixXd scores = ds.X * W.transpose();  // N x out_dim
  Eigen::VectorXd bias(out_dim);
  for (int j = 0; j < out_dim; ++j) {
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double mean_p =
          (1.0 / (1.0 + (-(scores.col(j).array() + mid)).exp())).mean();
      (mean_p < target ? lo : hi) = mid;
    }
    bias[j] = 0.5 * (lo + hi);
  }

  ds.Y.reserve(N);
  for (int i = 0; i < N; ++i) {
    MixedSample y;
    y.cont.resize(0);
    y.cat.resize(out_dim);
    for (int j = 0; j < out_dim; ++j) {
      const double p = 1.0 / (1.0 + std::exp(-(scores(i, j) + bias[j])));
      y.cat[j] = rng.bernoulli(p) ? 1 : 0;
    }
    ds.Y.push_back(std::move(y));
  }
  ds.meta.d1 = 0;
  ds.meta.d = out_dim;
  ds.meta.cat_lo = 0;
  ds.meta.cat_hi = 1;
  ds.label_names.resize(out_dim);
  return ds;
}

std::uint64_t binary_encode(const std::vector<int>& bits) {
  if (bits.size() > 63) throw std::invalid_argument("binary_encode: too many components");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1)
      throw std::invalid_argument("binary_encode: components must be 0/1");
    v += static_cast<std::uint64_t>(bits[i]) << i;
  }
  return v;
}

std::vector<int> binary_decode(std::uint64_t v, int d) {
  if (d < 0 || d > 63 || v >= (1ULL << d))
    throw std::invalid_argument("binary_decode: value out of range");
  std::vector<int> bits(d);
  for (int i = 0; i < d; ++i) bits[i] = static_cast<int>((v >> i) & 1ULL);
  return bits;
}

Dataset binary_encode_dataset(const Dataset& ds) {
  if (ds.meta.d1 != 0)
    throw std::invalid_argument("binary_encode_dataset: continuous targets present");
  if (ds.meta.cat_lo != 0 || ds.meta.cat_hi != 1)
    throw std::invalid_argument("binary_encode_dataset: targets must be binary");
  const int k = ds.meta.cat_dims();
  Dataset out;
  out.X = ds.X;
  out.Y.reserve(ds.size());
  for (const auto& y : ds.Y) {
    std::vector<int> bits(y.cat.data(), y.cat.data() + y.cat.size());
    MixedSample e;
    e.cont.resize(0);
    e.cat.resize(1);
    e.cat[0] = static_cast<int>(binary_encode(bits));
    out.Y.push_back(std::move(e));
  }
  out.meta.d1 = 0;
  out.meta.d = 1;
  out.meta.cat_lo = 0;
  out.meta.cat_hi = (1 << k) - 1;
  out.label_names.resize(1);
  return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double frac, Rng& rng) {
  if (frac <= 0.0 || frac >= 1.0)
    throw std::invalid_argument("train_test_split: frac must be in (0, 1)");
  const int n = ds.size();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  const int n_train = static_cast<int>(std::ceil(frac * n));
  const auto take = [&](int begin, int end) {
    Dataset part;
    part.meta = ds.meta;
    part.label_names = ds.label_names;
    part.X.resize(end - begin, ds.X.cols());
    part.Y.reserve(end - begin);
    for (int i = begin; i < end; ++i) {
      part.X.row(i - begin) = ds.X.row(idx[i]);
      part.Y.push_back(ds.Y[idx[i]]);
    }
    return part;
  };
  return {take(0, n_train), take(n_train, n)};
}

}  // namespace data
}  // namespace mixw2
