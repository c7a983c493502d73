#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edrvfl/dataset.hpp"
#include "edrvfl/network.hpp"

namespace edrvfl::evaluation {

using network::HyperParams;

enum class Variant { EdRVFL, WedRVFL, PedRVFL, WPedRVFL };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Applies the flag constraints a variant implies to a hyperparameter set.
// Throws InvalidArgument when the parameters contradict the variant.
void enforce_variant(Variant v, HyperParams& hp, bool strict);

// Full dataset in raw (pre-normalization) form; folds normalize themselves.
struct TableData {
  std::string name;
  Matrix features;
  IntVector y;
  int k = 0;
  std::vector<std::string> label_names;
};

TableData table_from_raw(const dataset::RawTable& raw, std::string name);

// Candidate lists mirroring the published tuning ranges.
struct GridSpec {
  std::vector<double> lambda{1.0};
  std::vector<int> hidden_neurons{500};
  std::vector<int> max_layers{10};
  std::vector<double> gamma{1.0};
  std::vector<double> alpha{0.0};
  std::vector<double> omega_r{1.0};
  std::vector<double> prune_rate{0.0};

  void validate() const;

  // Documented desk-scale default.
  static GridSpec coarse_default();

  // Deterministic enumeration: lambda ascending, then n, l_max, gamma,
  // alpha, omega_r, p. Variant constraints collapse the relevant axes.
  std::vector<HyperParams> expand(const HyperParams& base, Variant v) const;
};

double accuracy(const IntVector& predicted, const IntVector& truth);

struct CvResult {
  std::vector<double> fold_test_accuracy;
  double mean_test_accuracy = 0.0;
  HyperParams chosen;
  std::vector<double> candidate_avg_validation;
  std::uint64_t partition_seed = 0;
  std::uint64_t weight_seed = 0;
};

// 4-fold protocol: per fold an inner stratified validation split scores
// every grid point; one winner per dataset (best average validation
// accuracy, ties to the earliest grid point) is retrained on each full
// fold-training set and scored on the fold's test set.
CvResult run_cv(const TableData& table, Variant variant, const GridSpec& grid,
                int folds, double val_fraction, std::uint64_t partition_seed,
                std::uint64_t weight_seed, const HyperParams& base = {});

struct RunResult {
  std::string dataset;
  std::string variant;
  int folds = 0;
  std::vector<std::vector<double>> per_fold_accuracies;  // per repetition
  std::vector<double> per_seed_means;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over per-seed means
  HyperParams chosen;         // first repetition's winner
  std::vector<HyperParams> chosen_per_seed;
  std::uint64_t partition_seed = 0;
  std::vector<std::uint64_t> weight_seeds;
  double wall_seconds = 0.0;
};

// Repetitions re-seed the hidden features only; the fold partition stays
// fixed at base_seed. jobs > 1 runs repetitions concurrently.
RunResult repeat_runs(const TableData& table, Variant variant,
                      const GridSpec& grid, int repetitions,
                      std::uint64_t base_seed, int folds = 4,
                      double val_fraction = 0.25,
                      const HyperParams& base = {}, int jobs = 1);

// Per-dataset ranks (best accuracy = 1, ties averaged), averaged per method.
// Input is methods x datasets.
std::vector<double> average_ranks(
    const std::vector<std::vector<double>>& accuracy_matrix);

struct WilcoxonResult {
  double statistic = 0.0;  // rank sum of positive differences
  double p_value = 1.0;    // two-sided
  int n_used = 0;          // pairs left after dropping zero differences
  bool exact = false;
};

// Exact enumeration for n <= 20 non-zero differences, normal approximation
// with tie correction above that.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

struct SweepPoint {
  double value = 0.0;
  double accuracy = 0.0;
};

// Controlled one-parameter sweep: parameter is "omega_r" (requires p = 0 in
// fixed) or "p" (requires omega_r = 1). Each value runs a singleton-grid CV.
std::vector<SweepPoint> sweep(const TableData& table,
                              const std::string& parameter,
                              const std::vector<double>& values,
                              const HyperParams& fixed, int folds,
                              std::uint64_t seed);

namespace detail {

// Scores every candidate on one fold's validation split. Exposed for tests:
// must agree exactly with train()+predict() per candidate.
std::vector<double> evaluate_candidates_on_fold(
    const dataset::Dataset& fit_data, const Matrix& raw_val,
    const IntVector& val_y, const std::vector<HyperParams>& candidates,
    bool share_features);

}  // namespace detail

}  // namespace edrvfl::evaluation
