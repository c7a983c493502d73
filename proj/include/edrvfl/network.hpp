#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "edrvfl/dataset.hpp"
#include "edrvfl/solvers.hpp"

namespace edrvfl::network {

using solvers::Activation;
using solvers::BatchNormParams;
using solvers::BatchNormStats;
using solvers::SampleWeights;

enum class Aggregation { MeanScore, MajorityVote };

struct HyperParams {
  double lambda = 1.0;
  int hidden_neurons = 500;
  int max_layers = 10;
  double gamma = 1.0;
  double alpha = 0.0;
  double omega_r = 1.0;     // 1 disables weighting
  double prune_rate = 0.0;  // 0 disables pruning
  Activation activation = Activation::Relu;
  Aggregation aggregation = Aggregation::MeanScore;
  double epsilon = 1e-5;
  bool include_bias = true;
  std::uint64_t seed = 0;

  bool weighting_enabled() const { return omega_r < 1.0; }
  bool pruning_enabled() const { return prune_rate > 0.0; }
  void validate() const;  // throws InvalidArgument
};

bool operator==(const HyperParams& a, const HyperParams& b);

// One trained hidden layer. W maps this layer's input (previous layer's
// kept features + direct link) to n fresh neurons. beta was solved over the
// full [H | X] design of this layer; keep_mask only gates what propagates
// to the next layer.
struct LayerModel {
  Matrix W;
  RowVector bias_row;  // empty when bias disabled
  BatchNormStats bn_stats;
  std::vector<std::uint8_t> keep_mask;
  Matrix beta;

  bool has_bias() const { return bias_row.size() > 0; }
  int kept_count() const;
};

struct EnsembleModel {
  std::vector<LayerModel> layers;
  HyperParams hyperparams;
  dataset::ZScoreStats norm_stats;
  std::vector<std::string> label_names;
  int k = 0;

  Eigen::Index input_features() const { return norm_stats.mean.size(); }
};

struct LayerOutputs {
  std::vector<Matrix> scores;      // per layer, m x k
  std::vector<IntVector> labels;   // per layer argmax
};

struct TrainResult {
  EnsembleModel model;
  LayerOutputs outputs;                     // on the training data
  std::vector<double> layer_train_accuracy;
  std::vector<Vector> weight_history;       // one entry per weight update
  std::vector<std::string> warnings;
};

// Uniform [-1, 1) weights from a counter-based stream keyed by
// (seed, layer_index); identical inputs always give identical weights.
std::pair<Matrix, RowVector> init_layer_weights(int d_in, int n,
                                                std::uint64_t seed,
                                                int layer_index);

// g(BN(input * W + bias)). fit_mode fits and stores the batch-norm stats;
// otherwise the frozen stats are required. Columns masked out by keep_mask
// are dropped from the returned matrix.
Matrix forward_layer(const Matrix& input, LayerModel& layer,
                     const HyperParams& params, bool fit_mode);

TrainResult train(const dataset::Dataset& data, const HyperParams& hp);

// Sum of absolute output-weight coefficients per hidden neuron (first n
// rows of beta; direct-link rows are never scored).
Vector neuron_importance(const Matrix& beta, int n);

// Keeps all but the floor(p*n) lowest-importance neurons; ties are pruned
// lowest-index-first. At least one neuron always survives.
std::vector<std::uint8_t> prune_mask(const Vector& theta, double p);

// Weights are omega_r for correct samples and (m - n_r*omega_r)/n_w for
// wrong ones so the total stays m; all-correct (and all-wrong) collapse to
// ones. clamped reports when the wrong-sample weight hit the safety cap.
SampleWeights update_sample_weights(const std::vector<bool>& correct,
                                    double omega_r, bool* clamped = nullptr);

// X_new holds raw (pre-normalization) features; stored z-score stats are
// applied internally.
std::pair<IntVector, LayerOutputs> predict(const EnsembleModel& model,
                                           const Matrix& x_new);

// Ensemble restricted to the first `depth` layers.
IntVector predict_prefix(const EnsembleModel& model, const Matrix& x_new,
                         int depth);

IntVector aggregate_scores(const std::vector<Matrix>& scores,
                           Aggregation aggregation);

void save_model(const EnsembleModel& model, const std::string& path);
EnsembleModel load_model(const std::string& path);

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);
std::string aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string& name);

namespace detail {

// Unmasked forward pass shared by training, prediction and the grid
// evaluation engine: Z = input*W + bias, then batch norm, then activation.
Matrix forward_full(const Matrix& input, const LayerModel& layer,
                    const HyperParams& params, bool fit_mode,
                    BatchNormStats* stats_out);

Matrix mask_columns(const Matrix& h, const std::vector<std::uint8_t>& keep);

constexpr double kMaxWrongWeight = 1e6;

}  // namespace detail

}  // namespace edrvfl::network
