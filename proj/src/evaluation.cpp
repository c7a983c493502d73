#include "edrvfl/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "edrvfl/rng.hpp"

namespace edrvfl::evaluation {

using dataset::Dataset;
using network::EnsembleModel;
using network::LayerModel;
using solvers::SampleWeights;

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::EdRVFL: return "edrvfl";
    case Variant::WedRVFL: return "wedrvfl";
    case Variant::PedRVFL: return "pedrvfl";
    case Variant::WPedRVFL: return "wpedrvfl";
  }
  return "edrvfl";
}

Variant variant_from_name(const std::string& name) {
  if (name == "edrvfl") return Variant::EdRVFL;
  if (name == "wedrvfl") return Variant::WedRVFL;
  if (name == "pedrvfl") return Variant::PedRVFL;
  if (name == "wpedrvfl") return Variant::WPedRVFL;
  throw InvalidArgument("unknown variant: " + name);
}

void enforce_variant(Variant v, HyperParams& hp, bool strict) {
  const bool no_weighting = v == Variant::EdRVFL || v == Variant::PedRVFL;
  const bool no_pruning = v == Variant::EdRVFL || v == Variant::WedRVFL;
  if (strict) {
    if (no_weighting && hp.omega_r != 1.0) {
      throw InvalidArgument("variant " + variant_name(v) +
                            " requires omega_r = 1");
    }
    if (no_pruning && hp.prune_rate != 0.0) {
      throw InvalidArgument("variant " + variant_name(v) + " requires p = 0");
    }
  }
  if (no_weighting) hp.omega_r = 1.0;
  if (no_pruning) hp.prune_rate = 0.0;
}

TableData table_from_raw(const dataset::RawTable& raw, std::string name) {
  const dataset::LabelEncoding enc = dataset::encode_labels(raw);
  TableData table;
  table.name = std::move(name);
  table.features = raw.features;
  table.y = enc.y;
  table.k = enc.k;
  table.label_names = enc.names;
  return table;
}

namespace {

void check_range(const std::vector<double>& values, double lo, double hi,
                 bool lo_open, bool hi_open, const std::string& field) {
  if (values.empty()) {
    throw InvalidArgument("grid axis '" + field + "' is empty");
  }
  for (double v : values) {
    const bool lo_ok = lo_open ? v > lo : v >= lo;
    const bool hi_ok = hi_open ? v < hi : v <= hi;
    if (!std::isfinite(v) || !lo_ok || !hi_ok) {
      throw InvalidArgument("grid value " + std::to_string(v) +
                            " outside the tuning range for '" + field + "'");
    }
  }
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

void GridSpec::validate() const {
  check_range(lambda, std::pow(2.0, -12), std::pow(2.0, 12), false, false,
              "lambda");
  if (hidden_neurons.empty()) throw InvalidArgument("grid axis 'n' is empty");
  for (int n : hidden_neurons) {
    if (n < 20 || n > 1000) {
      throw InvalidArgument("grid value " + std::to_string(n) +
                            " outside the tuning range for 'n'");
    }
  }
  if (max_layers.empty()) {
    throw InvalidArgument("grid axis 'l_max' is empty");
  }
  for (int l : max_layers) {
    if (l < 1 || l > 10) {
      throw InvalidArgument("grid value " + std::to_string(l) +
                            " outside the tuning range for 'l_max'");
    }
  }
  check_range(gamma, 0.5, 2.0, false, false, "gamma");
  check_range(alpha, -2.0, 2.0, false, false, "alpha");
  check_range(omega_r, 0.0, 1.0, true, false, "omega_r");
  check_range(prune_rate, 0.0, 1.0, false, true, "p");
}

GridSpec GridSpec::coarse_default() {
  GridSpec g;
  g.lambda = {std::pow(2.0, -6), std::pow(2.0, -3), 1.0, 8.0, 64.0};
  g.hidden_neurons = {256, 512, 1000};
  g.max_layers = {10};
  g.gamma = {1.0};
  g.alpha = {0.0};
  g.omega_r = {1.0, 0.75, 0.5};
  g.prune_rate = {0.0, 0.25, 0.5};
  return g;
}

std::vector<HyperParams> GridSpec::expand(const HyperParams& base,
                                          Variant v) const {
  const auto lambdas = sorted_unique(lambda);
  const auto neurons = sorted_unique(hidden_neurons);
  const auto layers = sorted_unique(max_layers);
  const auto gammas = sorted_unique(gamma);
  const auto alphas = sorted_unique(alpha);
  auto omegas = sorted_unique(omega_r);
  auto prune_rates = sorted_unique(prune_rate);
  if (v == Variant::EdRVFL || v == Variant::PedRVFL) omegas = {1.0};
  if (v == Variant::EdRVFL || v == Variant::WedRVFL) prune_rates = {0.0};

  std::vector<HyperParams> out;
  for (double l : lambdas)
    for (int n : neurons)
      for (int lm : layers)
        for (double g : gammas)
          for (double a : alphas)
            for (double w : omegas)
              for (double p : prune_rates) {
                HyperParams hp = base;
                hp.lambda = l;
                hp.hidden_neurons = n;
                hp.max_layers = lm;
                hp.gamma = g;
                hp.alpha = a;
                hp.omega_r = w;
                hp.prune_rate = p;
                hp.validate();
                out.push_back(hp);
              }
  return out;
}

double accuracy(const IntVector& predicted, const IntVector& truth) {
  if (predicted.size() != truth.size() || predicted.size() == 0) {
    throw LengthMismatch("prediction and truth vectors must match and be "
                         "non-empty");
  }
  double correct = 0.0;
  for (Eigen::Index i = 0; i < predicted.size(); ++i) {
    if (predicted(i) == truth(i)) correct += 1.0;
  }
  return correct / static_cast<double>(predicted.size());
}

namespace detail {

namespace {

double evaluate_single(const Dataset& fit_data, const Matrix& raw_val,
                       const IntVector& val_y, const HyperParams& hp) {
  const network::TrainResult trained = network::train(fit_data, hp);
  const IntVector labels = network::predict(trained.model, raw_val).first;
  return accuracy(labels, val_y);
}

// Streams one hidden-layer stack shared by every (lambda, omega_r) combo in
// a no-pruning group: features do not depend on the solves, so the layer
// GEMMs and the unweighted Gram matrices are computed once per layer.
void evaluate_shared_group(const Dataset& fit_data, const Matrix& x_val,
                           const IntVector& val_y,
                           const std::vector<HyperParams>& candidates,
                           const std::vector<std::size_t>& member_indices,
                           std::vector<double>& out) {
  const HyperParams& proto = candidates[member_indices.front()];
  const Matrix& x_fit = fit_data.X;
  const Matrix& y_onehot = fit_data.Y;

  struct ComboState {
    std::size_t index;
    SampleWeights weights;
    std::vector<Matrix> val_scores;
  };
  std::vector<ComboState> combos;
  combos.reserve(member_indices.size());
  for (std::size_t idx : member_indices) {
    combos.push_back(
        {idx, SampleWeights::ones(x_fit.rows()), {}});
  }

  Matrix prop_fit = x_fit;
  Matrix prop_val = x_val;
  for (int l = 1; l <= proto.max_layers; ++l) {
    LayerModel layer;
    auto [w, bias] = network::init_layer_weights(
        static_cast<int>(prop_fit.cols()), proto.hidden_neurons, proto.seed,
        l);
    layer.W = std::move(w);
    if (proto.include_bias) layer.bias_row = std::move(bias);

    const Matrix h_fit = network::detail::forward_full(prop_fit, layer, proto,
                                                       true, &layer.bn_stats);
    const Matrix h_val = network::detail::forward_full(prop_val, layer, proto,
                                                       false, nullptr);
    const Matrix d_fit = hcat(h_fit, x_fit);
    const Matrix d_val = hcat(h_val, x_val);

    const bool primal = d_fit.cols() <= d_fit.rows();
    Matrix g_unweighted;
    Matrix rhs_unweighted;
    bool shared_ready = false;

    for (ComboState& combo : combos) {
      const HyperParams& hp = candidates[combo.index];
      const bool weighted = hp.weighting_enabled() && l >= 2;
      Matrix beta;
      if (weighted) {
        beta = solvers::solve_weighted_ridge(d_fit, y_onehot, hp.lambda,
                                             combo.weights);
      } else {
        if (!shared_ready) {
          if (primal) {
            g_unweighted = gram(d_fit);
            rhs_unweighted = d_fit.transpose() * y_onehot;
          } else {
            g_unweighted = gram_outer(d_fit);
          }
          shared_ready = true;
        }
        if (primal) {
          beta = solvers::detail::ridge_solve_spd(
              g_unweighted, rhs_unweighted, hp.lambda,
              max_abs(rhs_unweighted));
        } else {
          const Matrix alpha = solvers::detail::ridge_solve_spd(
              g_unweighted, y_onehot, hp.lambda, max_abs(y_onehot));
          beta = d_fit.transpose() * alpha;
        }
      }
      if (hp.weighting_enabled()) {
        const Matrix scores = d_fit * beta;
        const IntVector labels = argmax_rows(scores);
        std::vector<bool> correct(static_cast<std::size_t>(labels.size()));
        for (Eigen::Index i = 0; i < labels.size(); ++i) {
          correct[static_cast<std::size_t>(i)] = labels(i) == fit_data.y(i);
        }
        combo.weights = network::update_sample_weights(correct, hp.omega_r);
      }
      combo.val_scores.push_back(d_val * beta);
    }
    prop_fit = d_fit;
    prop_val = d_val;
  }

  for (ComboState& combo : combos) {
    const IntVector labels = network::aggregate_scores(
        combo.val_scores, candidates[combo.index].aggregation);
    out[combo.index] = accuracy(labels, val_y);
  }
}

}  // namespace

std::vector<double> evaluate_candidates_on_fold(
    const Dataset& fit_data, const Matrix& raw_val, const IntVector& val_y,
    const std::vector<HyperParams>& candidates, bool share_features) {
  std::vector<double> out(candidates.size(), 0.0);
  if (!share_features) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      out[i] = evaluate_single(fit_data, raw_val, val_y, candidates[i]);
    }
    return out;
  }

  const Matrix x_val = dataset::zscore_apply(raw_val, fit_data.norm_stats);
  // Group the prune-free candidates whose hidden features coincide.
  std::map<std::tuple<int, int, double, double>, std::vector<std::size_t>>
      groups;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const HyperParams& hp = candidates[i];
    if (hp.pruning_enabled()) {
      out[i] = evaluate_single(fit_data, raw_val, val_y, hp);
    } else {
      groups[{hp.hidden_neurons, hp.max_layers, hp.gamma, hp.alpha}]
          .push_back(i);
    }
  }
  for (const auto& [key, members] : groups) {
    evaluate_shared_group(fit_data, x_val, val_y, candidates, members, out);
  }
  return out;
}

}  // namespace detail

CvResult run_cv(const TableData& table, Variant variant, const GridSpec& grid,
                int folds, double val_fraction, std::uint64_t partition_seed,
                std::uint64_t weight_seed, const HyperParams& base) {
  grid.validate();
  if (table.features.rows() != table.y.size()) {
    throw DimensionMismatch("table features and labels disagree");
  }
  HyperParams seeded_base = base;
  seeded_base.seed = weight_seed;
  const std::vector<HyperParams> candidates =
      grid.expand(seeded_base, variant);

  const dataset::FoldPlan plan =
      dataset::stratified_kfold(table.y, folds, partition_seed);

  CvResult result;
  result.partition_seed = partition_seed;
  result.weight_seed = weight_seed;

  std::size_t winner = 0;
  if (candidates.size() > 1) {
    std::vector<double> avg_val(candidates.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
      const auto [fit_idx, val_idx] = dataset::train_val_split(
          plan.train_indices[f], table.y, val_fraction,
          mix64(partition_seed, static_cast<std::uint64_t>(f) + 1));
      const Dataset fit_data = dataset::make_training_dataset(
          take_rows(table.features, fit_idx), take(table.y, fit_idx), table.k,
          table.label_names);
      const Matrix raw_val = take_rows(table.features, val_idx);
      const IntVector val_y = take(table.y, val_idx);
      const std::vector<double> accs = detail::evaluate_candidates_on_fold(
          fit_data, raw_val, val_y, candidates, true);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        avg_val[c] += accs[c] / static_cast<double>(folds);
      }
    }
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      if (avg_val[c] > avg_val[winner]) winner = c;
    }
    result.candidate_avg_validation = std::move(avg_val);
  }
  result.chosen = candidates[winner];

  for (int f = 0; f < folds; ++f) {
    const Dataset full_data = dataset::make_training_dataset(
        take_rows(table.features, plan.train_indices[f]),
        take(table.y, plan.train_indices[f]), table.k, table.label_names);
    const network::TrainResult trained =
        network::train(full_data, result.chosen);
    const Matrix raw_test = take_rows(table.features, plan.test_indices[f]);
    const IntVector test_y = take(table.y, plan.test_indices[f]);
    const IntVector labels = network::predict(trained.model, raw_test).first;
    result.fold_test_accuracy.push_back(accuracy(labels, test_y));
  }
  result.mean_test_accuracy =
      std::accumulate(result.fold_test_accuracy.begin(),
                      result.fold_test_accuracy.end(), 0.0) /
      static_cast<double>(folds);
  return result;
}

RunResult repeat_runs(const TableData& table, Variant variant,
                      const GridSpec& grid, int repetitions,
                      std::uint64_t base_seed, int folds, double val_fraction,
                      const HyperParams& base, int jobs) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  std::vector<CvResult> reps(static_cast<std::size_t>(repetitions));
  std::vector<std::exception_ptr> errors(
      static_cast<std::size_t>(repetitions));

  auto run_one = [&](int r) {
    try {
      reps[static_cast<std::size_t>(r)] =
          run_cv(table, variant, grid, folds, val_fraction, base_seed,
                 base_seed + static_cast<std::uint64_t>(r), base);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  };

  const int workers = std::max(1, std::min(jobs, repetitions));
  if (workers == 1) {
    for (int r = 0; r < repetitions; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&]() {
        while (true) {
          const int r = next.fetch_add(1);
          if (r >= repetitions) break;
          run_one(r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunResult result;
  result.dataset = table.name;
  result.variant = variant_name(variant);
  result.folds = folds;
  result.partition_seed = base_seed;
  for (int r = 0; r < repetitions; ++r) {
    const CvResult& cv = reps[static_cast<std::size_t>(r)];
    result.per_fold_accuracies.push_back(cv.fold_test_accuracy);
    result.per_seed_means.push_back(cv.mean_test_accuracy);
    result.chosen_per_seed.push_back(cv.chosen);
    result.weight_seeds.push_back(cv.weight_seed);
  }
  result.chosen = result.chosen_per_seed.front();
  result.mean_accuracy =
      std::accumulate(result.per_seed_means.begin(),
                      result.per_seed_means.end(), 0.0) /
      static_cast<double>(repetitions);
  double ss = 0.0;
  for (double m : result.per_seed_means) {
    ss += (m - result.mean_accuracy) * (m - result.mean_accuracy);
  }
  result.std_accuracy = std::sqrt(ss / static_cast<double>(repetitions));
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

std::vector<double> average_ranks(
    const std::vector<std::vector<double>>& accuracy_matrix) {
  const std::size_t methods = accuracy_matrix.size();
  if (methods == 0) throw IncompleteMatrix("empty accuracy matrix");
  const std::size_t datasets = accuracy_matrix.front().size();
  if (datasets == 0) throw IncompleteMatrix("accuracy matrix has no columns");
  for (const auto& row : accuracy_matrix) {
    if (row.size() != datasets) {
      throw IncompleteMatrix("ragged accuracy matrix");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw IncompleteMatrix("accuracy matrix contains non-finite values");
      }
    }
  }

  std::vector<double> mean_rank(methods, 0.0);
  for (std::size_t d = 0; d < datasets; ++d) {
    std::vector<std::size_t> order(methods);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return accuracy_matrix[a][d] > accuracy_matrix[b][d];
                     });
    std::size_t i = 0;
    while (i < methods) {
      std::size_t j = i;
      while (j + 1 < methods &&
             accuracy_matrix[order[j + 1]][d] ==
                 accuracy_matrix[order[i]][d]) {
        ++j;
      }
      // Positions i..j (0-based) share the average of ranks i+1..j+1.
      const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) {
        mean_rank[order[t]] += rank / static_cast<double>(datasets);
      }
      i = j + 1;
    }
  }
  return mean_rank;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("paired vectors must have equal length");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  if (n < 5) {
    throw TooFewPairs("need at least 5 non-zero differences, have " +
                      std::to_string(n));
  }

  std::vector<int> order(diffs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> ranks(diffs.size(), 0.0);
  std::vector<int> tie_sizes;
  {
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() &&
             std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
        ++j;
      }
      const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
      tie_sizes.push_back(static_cast<int>(j - i + 1));
      i = j + 1;
    }
  }
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0.0) w_plus += ranks[i];
  }

  WilcoxonResult result;
  result.statistic = w_plus;
  result.n_used = n;
  if (n <= 20) {
    result.exact = true;
    // Doubled ranks are exact integers (tie averages are half-integers), so
    // the null distribution is an integer convolution over sign choices.
    std::vector<long long> doubled(diffs.size());
    long long total = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      doubled[i] = std::llround(2.0 * ranks[i]);
      total += doubled[i];
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long long reach = 0;
    for (long long r : doubled) {
      reach += r;
      for (long long s = reach; s >= r; --s) {
        counts[static_cast<std::size_t>(s)] +=
            counts[static_cast<std::size_t>(s - r)];
      }
    }
    const long long w2 = std::llround(2.0 * w_plus);
    double below = 0.0, above = 0.0, all = 0.0;
    for (long long s = 0; s <= total; ++s) {
      const double c = counts[static_cast<std::size_t>(s)];
      all += c;
      if (s <= w2) below += c;
      if (s >= w2) above += c;
    }
    result.p_value = std::min(1.0, 2.0 * std::min(below, above) / all);
  } else {
    result.exact = false;
    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    for (int t : tie_sizes) {
      const double td = static_cast<double>(t);
      var -= (td * td * td - td) / 48.0;
    }
    const double z = (w_plus - mu) / std::sqrt(var);
    result.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    if (result.p_value <= 0.0) result.p_value = 1e-300;
    if (result.p_value > 1.0) result.p_value = 1.0;
  }
  return result;
}

std::vector<SweepPoint> sweep(const TableData& table,
                              const std::string& parameter,
                              const std::vector<double>& values,
                              const HyperParams& fixed, int folds,
                              std::uint64_t seed) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  const bool sweep_omega = parameter == "omega_r";
  const bool sweep_prune = parameter == "p";
  if (!sweep_omega && !sweep_prune) {
    throw InvalidArgument("sweep parameter must be 'omega_r' or 'p'");
  }
  if (sweep_omega && fixed.prune_rate != 0.0) {
    throw InvalidArgument("sweeping omega_r requires fixed p = 0");
  }
  if (sweep_prune && fixed.omega_r != 1.0) {
    throw InvalidArgument("sweeping p requires fixed omega_r = 1");
  }

  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (double value : values) {
    HyperParams hp = fixed;
    if (sweep_omega) {
      hp.omega_r = value;
    } else {
      hp.prune_rate = value;
    }
    hp.validate();
    GridSpec grid;
    grid.lambda = {hp.lambda};
    grid.hidden_neurons = {hp.hidden_neurons};
    grid.max_layers = {hp.max_layers};
    grid.gamma = {hp.gamma};
    grid.alpha = {hp.alpha};
    grid.omega_r = {hp.omega_r};
    grid.prune_rate = {hp.prune_rate};
    const CvResult cv = run_cv(table, Variant::WPedRVFL, grid, folds, 0.25,
                               seed, seed, hp);
    points.push_back({value, cv.mean_test_accuracy});
  }
  return points;
}

}  // namespace edrvfl::evaluation
