// Single-purpose trainers used to pin down the degenerate-variant
// equivalences. Each one implements exactly one mechanism and contains no
// code for the others, so a flag leaking into a disabled path in the main
// trainer shows up as a bitwise difference in the per-layer output weights.
#pragma once

#include <vector>

#include "edrvfl/network.hpp"

namespace reference {

using edrvfl::IntVector;
using edrvfl::Matrix;
using edrvfl::hcat;
using edrvfl::dataset::Dataset;
using edrvfl::network::HyperParams;

// Plain edRVFL with re-normalization: no weighting, no pruning.
inline std::vector<Matrix> edrvfl_betas(const Dataset& data,
                                        const HyperParams& hp) {
  std::vector<Matrix> betas;
  Matrix prop = data.X;
  for (int l = 1; l <= hp.max_layers; ++l) {
    edrvfl::network::LayerModel layer;
    auto [w, bias] = edrvfl::network::init_layer_weights(
        static_cast<int>(prop.cols()), hp.hidden_neurons, hp.seed, l);
    layer.W = std::move(w);
    if (hp.include_bias) layer.bias_row = std::move(bias);
    const Matrix hidden = edrvfl::network::detail::forward_full(
        prop, layer, hp, true, &layer.bn_stats);
    const Matrix design = hcat(hidden, data.X);
    betas.push_back(
        edrvfl::solvers::solve_ridge_auto(design, data.Y, hp.lambda));
    prop = design;
  }
  return betas;
}

// Weighted edRVFL: layer 1 unweighted, deeper layers weighted by the
// previous layer's correctness. No pruning code.
inline std::vector<Matrix> wedrvfl_betas(const Dataset& data,
                                         const HyperParams& hp) {
  std::vector<Matrix> betas;
  Matrix prop = data.X;
  edrvfl::solvers::SampleWeights weights =
      edrvfl::solvers::SampleWeights::ones(data.X.rows());
  for (int l = 1; l <= hp.max_layers; ++l) {
    edrvfl::network::LayerModel layer;
    auto [w, bias] = edrvfl::network::init_layer_weights(
        static_cast<int>(prop.cols()), hp.hidden_neurons, hp.seed, l);
    layer.W = std::move(w);
    if (hp.include_bias) layer.bias_row = std::move(bias);
    const Matrix hidden = edrvfl::network::detail::forward_full(
        prop, layer, hp, true, &layer.bn_stats);
    const Matrix design = hcat(hidden, data.X);
    Matrix beta;
    if (l >= 2) {
      beta = edrvfl::solvers::solve_weighted_ridge(design, data.Y, hp.lambda,
                                                   weights);
    } else {
      beta = edrvfl::solvers::solve_ridge_auto(design, data.Y, hp.lambda);
    }
    const IntVector labels = edrvfl::argmax_rows(design * beta);
    std::vector<bool> correct(static_cast<std::size_t>(labels.size()));
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      correct[static_cast<std::size_t>(i)] = labels(i) == data.y(i);
    }
    weights = edrvfl::network::update_sample_weights(correct, hp.omega_r);
    betas.push_back(std::move(beta));
    prop = design;
  }
  return betas;
}

// Pruned edRVFL: lowest-importance neurons are masked out of the next
// layer's input. No weighting code.
inline std::vector<Matrix> pedrvfl_betas(const Dataset& data,
                                         const HyperParams& hp) {
  std::vector<Matrix> betas;
  Matrix prop = data.X;
  for (int l = 1; l <= hp.max_layers; ++l) {
    edrvfl::network::LayerModel layer;
    auto [w, bias] = edrvfl::network::init_layer_weights(
        static_cast<int>(prop.cols()), hp.hidden_neurons, hp.seed, l);
    layer.W = std::move(w);
    if (hp.include_bias) layer.bias_row = std::move(bias);
    const Matrix hidden = edrvfl::network::detail::forward_full(
        prop, layer, hp, true, &layer.bn_stats);
    const Matrix design = hcat(hidden, data.X);
    Matrix beta =
        edrvfl::solvers::solve_ridge_auto(design, data.Y, hp.lambda);
    const edrvfl::Vector theta =
        edrvfl::network::neuron_importance(beta, hp.hidden_neurons);
    const auto keep = edrvfl::network::prune_mask(theta, hp.prune_rate);
    prop = hcat(edrvfl::network::detail::mask_columns(hidden, keep), data.X);
    betas.push_back(std::move(beta));
  }
  return betas;
}

}  // namespace reference
