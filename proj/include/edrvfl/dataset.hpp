#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "edrvfl/errors.hpp"
#include "edrvfl/linalg.hpp"

namespace edrvfl::dataset {

// Parsed CSV: numeric feature columns plus one label column kept as text.
struct RawTable {
  std::vector<std::string> feature_names;
  std::string label_name;
  Matrix features;
  std::vector<std::string> labels;
};

struct LabelEncoding {
  IntVector y;
  int k = 0;
  std::vector<std::string> names;  // class index -> original label
};

// Per-feature z-score statistics. sigma == 0 marks a constant column whose
// normalized value is defined as 0.
struct ZScoreStats {
  Vector mean;
  Vector sigma;
};

struct FoldPlan {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> train_indices;
  std::vector<std::vector<int>> test_indices;
};

// Training-ready view: z-scored features plus encoded and one-hot targets.
struct Dataset {
  Matrix X;
  IntVector y;
  Matrix Y;
  int k = 0;
  std::vector<std::string> label_names;
  ZScoreStats norm_stats;
};

// label_column is a 0-based column index or, when the file has a header, a
// column name. Rows/columns in errors are 0-based over data rows.
RawTable load_csv(const std::string& path, const std::string& label_column,
                  bool has_header);

// Feature-only loader used by prediction inputs. Zero data rows is legal
// here. drop_column (name or index, empty for none) removes e.g. a label
// column that should not be treated as a feature.
Matrix load_features_csv(const std::string& path, bool has_header,
                         const std::string& drop_column);

// Classes are assigned 0..k-1 in lexicographic order of the label strings.
LabelEncoding encode_labels(const RawTable& raw);

ZScoreStats zscore_fit(const Matrix& x_train);
Matrix zscore_apply(const Matrix& x, const ZScoreStats& stats);

Matrix one_hot(const IntVector& y, int k);

FoldPlan stratified_kfold(const IntVector& y, int folds, std::uint64_t seed);

// Stratified split of train_indices into (fit, validation); |val| is
// round(fraction * |train|) apportioned per class by largest remainder.
std::pair<std::vector<int>, std::vector<int>> train_val_split(
    const std::vector<int>& train_indices, const IntVector& y,
    double fraction, std::uint64_t seed);

// Fits z-score stats on the given rows and assembles the normalized view.
Dataset make_training_dataset(const Matrix& raw_features, const IntVector& y,
                              int k, std::vector<std::string> label_names);

}  // namespace edrvfl::dataset
