#include "edrvfl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "edrvfl/rng.hpp"

namespace edrvfl::dataset {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_index(const std::string& s, long& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

struct ParsedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

ParsedCsv read_rows(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open file: " + path);
  }
  ParsedCsv out;
  std::string line;
  bool header_pending = has_header;
  std::size_t width = 0;
  long data_row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (header_pending) {
      out.header = fields;
      width = fields.size();
      header_pending = false;
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError(data_row, static_cast<long>(fields.size()),
                       "expected " + std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()));
    }
    out.rows.push_back(std::move(fields));
    ++data_row;
  }
  return out;
}

// Resolves a column selector (index string or header name) to an index.
long resolve_column(const std::vector<std::string>& header,
                    std::size_t width, const std::string& selector) {
  long idx = -1;
  if (parse_index(selector, idx)) {
    if (idx < 0 || idx >= static_cast<long>(width)) {
      throw MissingLabelColumn("column index " + selector +
                               " out of range for " + std::to_string(width) +
                               " columns");
    }
    return idx;
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == selector) return static_cast<long>(j);
  }
  throw MissingLabelColumn("no column named '" + selector + "'");
}

}  // namespace

RawTable load_csv(const std::string& path, const std::string& label_column,
                  bool has_header) {
  ParsedCsv csv = read_rows(path, has_header);
  if (csv.rows.empty()) {
    throw ParseError("no data rows in " + path);
  }
  const std::size_t width = csv.rows.front().size();
  if (width < 2) {
    throw ParseError("need at least one feature column and a label column");
  }
  const long label_idx = resolve_column(csv.header, width, label_column);

  RawTable table;
  table.features.resize(static_cast<Eigen::Index>(csv.rows.size()),
                        static_cast<Eigen::Index>(width - 1));
  table.labels.reserve(csv.rows.size());
  for (std::size_t j = 0; j < width; ++j) {
    const std::string name = j < csv.header.size()
                                 ? csv.header[j]
                                 : "c" + std::to_string(j);
    if (static_cast<long>(j) == label_idx) {
      table.label_name = name;
    } else {
      table.feature_names.push_back(name);
    }
  }
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    Eigen::Index feature_col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& field = csv.rows[i][j];
      if (static_cast<long>(j) == label_idx) {
        if (field.empty()) {
          throw ParseError(static_cast<long>(i), static_cast<long>(j),
                           "empty label");
        }
        table.labels.push_back(field);
        continue;
      }
      double value = 0.0;
      if (!parse_double(field, value)) {
        throw ParseError(static_cast<long>(i), static_cast<long>(j),
                         "not a finite number: '" + field + "'");
      }
      table.features(static_cast<Eigen::Index>(i), feature_col++) = value;
    }
  }
  return table;
}

Matrix load_features_csv(const std::string& path, bool has_header,
                         const std::string& drop_column) {
  ParsedCsv csv = read_rows(path, has_header);
  if (csv.rows.empty()) {
    return Matrix(0, 0);
  }
  const std::size_t width = csv.rows.front().size();
  long drop_idx = -1;
  if (!drop_column.empty()) {
    drop_idx = resolve_column(csv.header, width, drop_column);
  }
  const Eigen::Index cols =
      static_cast<Eigen::Index>(width - (drop_idx >= 0 ? 1 : 0));
  Matrix features(static_cast<Eigen::Index>(csv.rows.size()), cols);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (static_cast<long>(j) == drop_idx) continue;
      double value = 0.0;
      if (!parse_double(csv.rows[i][j], value)) {
        throw ParseError(static_cast<long>(i), static_cast<long>(j),
                         "not a finite number: '" + csv.rows[i][j] + "'");
      }
      features(static_cast<Eigen::Index>(i), col++) = value;
    }
  }
  return features;
}

LabelEncoding encode_labels(const RawTable& raw) {
  std::map<std::string, int> index;
  for (const auto& label : raw.labels) index.emplace(label, 0);
  if (index.size() < 2) {
    throw SingleClass("need at least two distinct labels, found " +
                      std::to_string(index.size()));
  }
  LabelEncoding enc;
  enc.k = static_cast<int>(index.size());
  enc.names.reserve(index.size());
  int next = 0;
  for (auto& [name, id] : index) {
    id = next++;
    enc.names.push_back(name);
  }
  enc.y.resize(static_cast<Eigen::Index>(raw.labels.size()));
  for (std::size_t i = 0; i < raw.labels.size(); ++i) {
    enc.y(static_cast<Eigen::Index>(i)) = index[raw.labels[i]];
  }
  return enc;
}

ZScoreStats zscore_fit(const Matrix& x_train) {
  if (x_train.rows() < 1) {
    throw EmptyMatrix("zscore_fit requires at least one row");
  }
  ZScoreStats stats;
  stats.mean = x_train.colwise().mean();
  stats.sigma.resize(x_train.cols());
  for (Eigen::Index j = 0; j < x_train.cols(); ++j) {
    // Exactly-constant columns get sigma = 0 and normalize to 0.
    if (x_train.col(j).minCoeff() == x_train.col(j).maxCoeff()) {
      stats.sigma(j) = 0.0;
      continue;
    }
    const double var =
        (x_train.col(j).array() - stats.mean(j)).square().sum() /
        static_cast<double>(x_train.rows());
    stats.sigma(j) = std::sqrt(var);
  }
  return stats;
}

Matrix zscore_apply(const Matrix& x, const ZScoreStats& stats) {
  if (x.cols() != stats.mean.size()) {
    throw DimensionMismatch("matrix has " + std::to_string(x.cols()) +
                            " columns but stats were fitted on " +
                            std::to_string(stats.mean.size()));
  }
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (stats.sigma(j) == 0.0) {
      out.col(j).setZero();
    } else {
      out.col(j) = (x.col(j).array() - stats.mean(j)) / stats.sigma(j);
    }
  }
  return out;
}

Matrix one_hot(const IntVector& y, int k) {
  if (k < 2) throw InvalidArgument("one_hot requires k >= 2");
  Matrix out = Matrix::Zero(y.size(), k);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) < 0 || y(i) >= k) {
      throw InvalidArgument("label " + std::to_string(y(i)) +
                            " outside [0, " + std::to_string(k) + ")");
    }
    out(i, y(i)) = 1.0;
  }
  return out;
}

FoldPlan stratified_kfold(const IntVector& y, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("folds must be >= 2");
  if (y.size() < folds) {
    throw InvalidArgument("fewer samples than folds");
  }
  const int k = y.size() > 0 ? y.maxCoeff() + 1 : 0;
  std::vector<std::vector<int>> by_class(k);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) < 0) throw InvalidArgument("negative class label");
    by_class[y(i)].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < k; ++c) {
    if (static_cast<int>(by_class[c].size()) < folds) {
      throw ClassTooSmall("class " + std::to_string(c) + " has " +
                          std::to_string(by_class[c].size()) +
                          " samples, fewer than " + std::to_string(folds) +
                          " folds");
    }
  }

  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  plan.test_indices.assign(folds, {});
  SplitMix64 rng(mix64(seed));
  for (int c = 0; c < k; ++c) {
    deterministic_shuffle(by_class[c], rng);
    // Rotate the dealing start per class so no fold is systematically larger.
    const int start = c % folds;
    for (std::size_t j = 0; j < by_class[c].size(); ++j) {
      plan.test_indices[(start + j) % folds].push_back(by_class[c][j]);
    }
  }
  plan.train_indices.assign(folds, {});
  std::vector<int> fold_of(y.size(), -1);
  for (int f = 0; f < folds; ++f) {
    std::sort(plan.test_indices[f].begin(), plan.test_indices[f].end());
    for (int idx : plan.test_indices[f]) fold_of[idx] = f;
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    for (int f = 0; f < folds; ++f) {
      if (fold_of[i] != f) plan.train_indices[f].push_back(static_cast<int>(i));
    }
  }
  return plan;
}

std::pair<std::vector<int>, std::vector<int>> train_val_split(
    const std::vector<int>& train_indices, const IntVector& y,
    double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("fraction must be in (0, 1)");
  }
  if (train_indices.empty()) {
    throw InvalidArgument("empty index set");
  }
  std::map<int, std::vector<int>> by_class;
  for (int idx : train_indices) by_class[y(idx)].push_back(idx);

  const long total = static_cast<long>(train_indices.size());
  const long target = std::lround(fraction * static_cast<double>(total));

  // Largest-remainder apportionment, capped so every class keeps >= 1
  // sample on the fit side.
  struct ClassQuota {
    int cls;
    long quota;
    long cap;
    double remainder;
  };
  std::vector<ClassQuota> quotas;
  long assigned = 0;
  for (auto& [cls, members] : by_class) {
    const double exact = fraction * static_cast<double>(members.size());
    ClassQuota q;
    q.cls = cls;
    q.quota = static_cast<long>(std::floor(exact));
    q.cap = static_cast<long>(members.size()) - 1;
    q.quota = std::min(q.quota, q.cap);
    q.remainder = exact - std::floor(exact);
    assigned += q.quota;
    quotas.push_back(q);
  }
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quotas[a].remainder > quotas[b].remainder;
  });
  long remaining = target - assigned;
  while (remaining > 0) {
    bool placed = false;
    for (std::size_t i : order) {
      if (remaining == 0) break;
      if (quotas[i].quota < quotas[i].cap) {
        ++quotas[i].quota;
        --remaining;
        placed = true;
      }
    }
    if (!placed) {
      throw ClassTooSmall(
          "cannot allocate " + std::to_string(target) +
          " validation samples while keeping one fit sample per class");
    }
  }

  SplitMix64 rng(mix64(seed));
  std::vector<int> fit, val;
  for (auto& q : quotas) {
    auto& members = by_class[q.cls];
    deterministic_shuffle(members, rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (static_cast<long>(j) < q.quota) {
        val.push_back(members[j]);
      } else {
        fit.push_back(members[j]);
      }
    }
  }
  std::sort(fit.begin(), fit.end());
  std::sort(val.begin(), val.end());
  return {fit, val};
}

Dataset make_training_dataset(const Matrix& raw_features, const IntVector& y,
                              int k, std::vector<std::string> label_names) {
  if (raw_features.rows() != y.size()) {
    throw DimensionMismatch("feature rows do not match label count");
  }
  Dataset ds;
  ds.norm_stats = zscore_fit(raw_features);
  ds.X = zscore_apply(raw_features, ds.norm_stats);
  ds.y = y;
  ds.k = k;
  ds.Y = one_hot(y, k);
  ds.label_names = std::move(label_names);
  return ds;
}

}  // namespace edrvfl::dataset
