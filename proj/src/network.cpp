#include "edrvfl/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edrvfl/rng.hpp"

namespace edrvfl::network {

void HyperParams::validate() const {
  if (!(std::isfinite(lambda)) || lambda < 0.0) {
    throw InvalidArgument("lambda must be finite and non-negative");
  }
  if (hidden_neurons < 1) {
    throw InvalidArgument("hidden_neurons must be >= 1");
  }
  if (max_layers < 1) {
    throw InvalidArgument("max_layers must be >= 1");
  }
  if (!std::isfinite(gamma) || !std::isfinite(alpha)) {
    throw InvalidArgument("gamma and alpha must be finite");
  }
  if (!(omega_r > 0.0 && omega_r <= 1.0)) {
    throw InvalidArgument("omega_r must be in (0, 1]");
  }
  if (!(prune_rate >= 0.0 && prune_rate < 1.0)) {
    throw InvalidArgument("prune_rate must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("epsilon must be positive");
  }
}

bool operator==(const HyperParams& a, const HyperParams& b) {
  return a.lambda == b.lambda && a.hidden_neurons == b.hidden_neurons &&
         a.max_layers == b.max_layers && a.gamma == b.gamma &&
         a.alpha == b.alpha && a.omega_r == b.omega_r &&
         a.prune_rate == b.prune_rate && a.activation == b.activation &&
         a.aggregation == b.aggregation && a.epsilon == b.epsilon &&
         a.include_bias == b.include_bias && a.seed == b.seed;
}

int LayerModel::kept_count() const {
  return static_cast<int>(
      std::count(keep_mask.begin(), keep_mask.end(), std::uint8_t{1}));
}

std::pair<Matrix, RowVector> init_layer_weights(int d_in, int n,
                                                std::uint64_t seed,
                                                int layer_index) {
  if (d_in < 1 || n < 1) {
    throw InvalidArgument("layer dimensions must be >= 1");
  }
  const UniformStream stream(seed, static_cast<std::uint64_t>(layer_index));
  Matrix w(d_in, n);
  for (int r = 0; r < d_in; ++r) {
    for (int c = 0; c < n; ++c) {
      w(r, c) = stream.symmetric(static_cast<std::uint64_t>(r) * n + c);
    }
  }
  RowVector bias(n);
  const std::uint64_t offset = static_cast<std::uint64_t>(d_in) * n;
  for (int c = 0; c < n; ++c) {
    bias(c) = stream.symmetric(offset + c);
  }
  return {std::move(w), std::move(bias)};
}

namespace detail {

Matrix forward_full(const Matrix& input, const LayerModel& layer,
                    const HyperParams& params, bool fit_mode,
                    BatchNormStats* stats_out) {
  if (input.cols() != layer.W.rows()) {
    throw DimensionMismatch("layer expects " + std::to_string(layer.W.rows()) +
                            " input columns, got " +
                            std::to_string(input.cols()));
  }
  Matrix z = input * layer.W;
  if (layer.has_bias()) {
    z.rowwise() += layer.bias_row;
  }
  BatchNormStats fresh;
  const BatchNormStats* stats = &layer.bn_stats;
  if (fit_mode) {
    fresh = solvers::batch_norm_fit(z, params.epsilon);
    stats = &fresh;
    if (stats_out != nullptr) *stats_out = fresh;
  } else if (!layer.bn_stats.fitted()) {
    throw StatsNotFitted("layer has no frozen batch-norm statistics");
  }
  const Matrix normalized = solvers::batch_norm_apply(
      z, *stats, BatchNormParams{params.gamma, params.alpha});
  return solvers::apply_activation(normalized, params.activation);
}

Matrix mask_columns(const Matrix& h, const std::vector<std::uint8_t>& keep) {
  if (keep.empty()) return h;
  if (static_cast<Eigen::Index>(keep.size()) != h.cols()) {
    throw DimensionMismatch("keep mask length does not match column count");
  }
  const Eigen::Index kept =
      std::count(keep.begin(), keep.end(), std::uint8_t{1});
  Matrix out(h.rows(), kept);
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    if (keep[j]) out.col(col++) = h.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

}  // namespace detail

Matrix forward_layer(const Matrix& input, LayerModel& layer,
                     const HyperParams& params, bool fit_mode) {
  BatchNormStats stats;
  Matrix h = detail::forward_full(input, layer, params, fit_mode,
                                  fit_mode ? &stats : nullptr);
  if (fit_mode) layer.bn_stats = std::move(stats);
  return detail::mask_columns(h, layer.keep_mask);
}

Vector neuron_importance(const Matrix& beta, int n) {
  if (n < 1 || beta.rows() < n) {
    throw DimensionMismatch("beta has " + std::to_string(beta.rows()) +
                            " rows, cannot score " + std::to_string(n) +
                            " neurons");
  }
  Vector theta(n);
  for (int j = 0; j < n; ++j) {
    theta(j) = beta.row(j).cwiseAbs().sum();
  }
  return theta;
}

std::vector<std::uint8_t> prune_mask(const Vector& theta, double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidArgument("pruning rate must be in [0, 1)");
  }
  const int n = static_cast<int>(theta.size());
  if (n < 1) throw InvalidArgument("empty importance vector");
  // Small slack so rates given as ratios (1/3 on 3 neurons) prune as meant.
  int prune_count = static_cast<int>(std::floor(p * n + 1e-9));
  prune_count = std::min(prune_count, n - 1);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (theta(a) != theta(b)) return theta(a) < theta(b);
    return a < b;
  });
  std::vector<std::uint8_t> keep(n, 1);
  for (int i = 0; i < prune_count; ++i) keep[order[i]] = 0;
  return keep;
}

SampleWeights update_sample_weights(const std::vector<bool>& correct,
                                    double omega_r, bool* clamped) {
  if (!(omega_r > 0.0 && omega_r <= 1.0)) {
    throw InvalidArgument("omega_r must be in (0, 1]");
  }
  if (correct.empty()) {
    throw InvalidArgument("empty correctness vector");
  }
  if (clamped != nullptr) *clamped = false;
  const auto m = static_cast<Eigen::Index>(correct.size());
  const auto n_r = static_cast<double>(
      std::count(correct.begin(), correct.end(), true));
  const double n_w = static_cast<double>(m) - n_r;

  SampleWeights weights;
  if (n_w == 0.0) {
    weights.w = Vector::Ones(m);
    return weights;
  }
  double omega_w = (static_cast<double>(m) - n_r * omega_r) / n_w;
  if (omega_w > detail::kMaxWrongWeight) {
    omega_w = detail::kMaxWrongWeight;
    if (clamped != nullptr) *clamped = true;
  }
  weights.w.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    weights.w(i) = correct[static_cast<std::size_t>(i)] ? omega_r : omega_w;
  }
  return weights;
}

TrainResult train(const dataset::Dataset& data, const HyperParams& hp) {
  hp.validate();
  if (data.X.rows() != data.y.size() || data.X.rows() != data.Y.rows() ||
      data.Y.cols() != data.k) {
    throw DimensionMismatch("inconsistent dataset shapes");
  }
  if (data.k < 2) throw InvalidArgument("need at least two classes");
  {
    std::vector<int> counts(data.k, 0);
    for (Eigen::Index i = 0; i < data.y.size(); ++i) ++counts[data.y(i)];
    for (int c = 0; c < data.k; ++c) {
      if (counts[c] == 0) {
        throw ClassAbsent("class " + std::to_string(c) +
                          " has no training samples");
      }
    }
  }

  const Matrix& x = data.X;
  const Eigen::Index m = x.rows();

  TrainResult result;
  result.model.hyperparams = hp;
  result.model.norm_stats = data.norm_stats;
  result.model.label_names = data.label_names;
  result.model.k = data.k;

  Matrix prop = x;
  SampleWeights weights = SampleWeights::ones(m);

  for (int l = 1; l <= hp.max_layers; ++l) {
    LayerModel layer;
    auto [w, bias] = init_layer_weights(static_cast<int>(prop.cols()),
                                        hp.hidden_neurons, hp.seed, l);
    layer.W = std::move(w);
    if (hp.include_bias) layer.bias_row = std::move(bias);

    const Matrix hidden =
        detail::forward_full(prop, layer, hp, true, &layer.bn_stats);
    const Matrix design = hcat(hidden, x);

    // Layer 1 always solves unweighted; all samples share weight 1 there.
    if (l >= 2 && hp.weighting_enabled()) {
      layer.beta = solvers::solve_weighted_ridge(design, data.Y, hp.lambda,
                                                 weights);
    } else {
      layer.beta = solvers::solve_ridge_auto(design, data.Y, hp.lambda);
    }

    Matrix scores = design * layer.beta;
    IntVector labels = argmax_rows(scores);
    double correct_count = 0.0;
    if (hp.weighting_enabled()) {
      std::vector<bool> correct(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i < m; ++i) {
        correct[static_cast<std::size_t>(i)] = labels(i) == data.y(i);
        if (correct[static_cast<std::size_t>(i)]) correct_count += 1.0;
      }
      bool clamped = false;
      weights = update_sample_weights(correct, hp.omega_r, &clamped);
      if (clamped) {
        result.warnings.push_back(
            "layer " + std::to_string(l) +
            ": wrong-sample weight clamped to 1e6; weight sum no longer m");
      }
      result.weight_history.push_back(weights.w);
    } else {
      for (Eigen::Index i = 0; i < m; ++i) {
        if (labels(i) == data.y(i)) correct_count += 1.0;
      }
    }
    result.layer_train_accuracy.push_back(correct_count /
                                          static_cast<double>(m));

    if (hp.pruning_enabled()) {
      const Vector theta = neuron_importance(layer.beta, hp.hidden_neurons);
      layer.keep_mask = prune_mask(theta, hp.prune_rate);
    } else {
      layer.keep_mask.assign(static_cast<std::size_t>(hp.hidden_neurons), 1);
    }

    prop = hcat(detail::mask_columns(hidden, layer.keep_mask), x);
    result.outputs.scores.push_back(std::move(scores));
    result.outputs.labels.push_back(std::move(labels));
    result.model.layers.push_back(std::move(layer));
  }
  return result;
}

namespace {

std::vector<Matrix> predict_scores(const EnsembleModel& model,
                                   const Matrix& x_raw, int depth) {
  if (model.layers.empty()) {
    throw InvalidArgument("model has no layers");
  }
  if (depth < 1 || depth > static_cast<int>(model.layers.size())) {
    throw DepthOutOfRange("depth " + std::to_string(depth) +
                          " outside [1, " +
                          std::to_string(model.layers.size()) + "]");
  }
  if (x_raw.cols() != model.input_features()) {
    throw DimensionMismatch("model expects " +
                            std::to_string(model.input_features()) +
                            " features, got " + std::to_string(x_raw.cols()));
  }
  const Matrix x = dataset::zscore_apply(x_raw, model.norm_stats);
  const HyperParams& hp = model.hyperparams;

  std::vector<Matrix> scores;
  scores.reserve(static_cast<std::size_t>(depth));
  Matrix prop = x;
  for (int l = 0; l < depth; ++l) {
    const LayerModel& layer = model.layers[static_cast<std::size_t>(l)];
    const Matrix hidden =
        detail::forward_full(prop, layer, hp, false, nullptr);
    scores.push_back(hcat(hidden, x) * layer.beta);
    if (l + 1 < depth) {
      prop = hcat(detail::mask_columns(hidden, layer.keep_mask), x);
    }
  }
  return scores;
}

}  // namespace

IntVector aggregate_scores(const std::vector<Matrix>& scores,
                           Aggregation aggregation) {
  if (scores.empty()) throw InvalidArgument("no layer scores to aggregate");
  const Eigen::Index m = scores.front().rows();
  const Eigen::Index k = scores.front().cols();
  Matrix mean = Matrix::Zero(m, k);
  for (const Matrix& s : scores) mean += s;
  mean /= static_cast<double>(scores.size());

  if (aggregation == Aggregation::MeanScore) {
    return argmax_rows(mean);
  }

  IntVector labels(m);
  std::vector<int> votes(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < m; ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const Matrix& s : scores) ++votes[argmax_row(s, i)];
    // Modal class; ties fall back to mean score, then to the lower index.
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (votes[c] > votes[best] ||
          (votes[c] == votes[best] && mean(i, c) > mean(i, best))) {
        best = c;
      }
    }
    labels(i) = best;
  }
  return labels;
}

std::pair<IntVector, LayerOutputs> predict(const EnsembleModel& model,
                                           const Matrix& x_new) {
  auto scores = predict_scores(model, x_new,
                               static_cast<int>(model.layers.size()));
  LayerOutputs outputs;
  outputs.labels.reserve(scores.size());
  for (const Matrix& s : scores) outputs.labels.push_back(argmax_rows(s));
  IntVector labels =
      aggregate_scores(scores, model.hyperparams.aggregation);
  outputs.scores = std::move(scores);
  return {std::move(labels), std::move(outputs)};
}

IntVector predict_prefix(const EnsembleModel& model, const Matrix& x_new,
                         int depth) {
  const auto scores = predict_scores(model, x_new, depth);
  return aggregate_scores(scores, model.hyperparams.aggregation);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
  }
  return "relu";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  throw InvalidArgument("unknown activation: " + name);
}

std::string aggregation_name(Aggregation a) {
  return a == Aggregation::MeanScore ? "mean_score" : "majority_vote";
}

Aggregation aggregation_from_name(const std::string& name) {
  if (name == "mean_score") return Aggregation::MeanScore;
  if (name == "majority_vote") return Aggregation::MajorityVote;
  throw InvalidArgument("unknown aggregation: " + name);
}

}  // namespace edrvfl::network
