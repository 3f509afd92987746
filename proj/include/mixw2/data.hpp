#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mixw2/mixed.hpp"
#include "mixw2/rng.hpp"

namespace mixw2 {
namespace data {

/// Column roles for CSV ingestion (0-based column indices).
struct ColumnSchema {
  std::vector<int> feature_cols;
  std::vector<int> cont_target_cols;
  std::vector<int> cat_target_cols;
  bool has_header = true;
};

struct Dataset {
  Eigen::MatrixXd X;             // N x n_features
  std::vector<MixedSample> Y;    // N targets
  MixedMetricConfig meta;        // d1, d, category bounds
  // per categorical slot: category index -> original label text; empty for
  // columns that were already integers
  std::vector<std::vector<std::string>> label_names;

  int size() const { return static_cast<int>(Y.size()); }
  int feature_dim() const { return static_cast<int>(X.cols()); }
};

/// Parse a CSV into a dataset. Categorical labels that do not parse as
/// integers are mapped to contiguous indices in order of first appearance.
/// If `fixed_labels` is given (e.g. the training dictionary at test time),
/// it is used instead, and an unseen label is an error.
Dataset load_csv(const std::string& path, const ColumnSchema& schema,
                 const std::vector<std::vector<std::string>>* fixed_labels = nullptr);

void write_csv(const std::string& path, const Dataset& ds);

/// Infer the column roles from a header written by write_csv
/// (x*, yc*, yk* prefixes).
ColumnSchema infer_schema(const std::string& path);

struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // floored at 1e-12
};

/// Standardize features to train mean 0 / variance 1; the train statistics
/// are reused verbatim on the test split.
NormalizationStats normalize_features(Dataset& train, Dataset* test = nullptr);
void apply_normalization(Dataset& ds, const NormalizationStats& stats);

/// For each input, the sorted indices of all inputs within l2 distance
/// delta (self always included).
struct NeighborIndex {
  double delta = 0.0;
  std::vector<std::vector<int>> ball;
};
NeighborIndex build_neighborhoods(const Eigen::MatrixXd& X, double delta);

/// Uniform sample of n distinct indices from [0, N), sorted.
std::vector<int> sample_minibatch(int N, int n, Rng& rng);

/// Step-function classification data: x ~ U(-0.1, 1.1), noisy bucket index
/// floor(4x + xi) with xi ~ N(0, sigma^2), mapped through {3, 4, 1, 2, 0}
/// inside [0, 5) and to 5 outside.
Dataset generate_example1(int N, double sigma, Rng& rng);

/// Synthetic multilabel data: features from a seeded Gaussian mixture,
/// each binary label a logistic of a random linear score with the bias
/// calibrated so the expected number of active labels matches avg_active.
Dataset generate_multilabel(int N, int in_dim, int out_dim, double avg_active, Rng& rng);

std::uint64_t binary_encode(const std::vector<int>& bits);
std::vector<int> binary_decode(std::uint64_t v, int d);

/// Collapse a {0,1}^k categorical target into one encoded slot.
Dataset binary_encode_dataset(const Dataset& ds);

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double frac, Rng& rng);

}  // namespace data
}  // namespace mixw2
