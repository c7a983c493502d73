#include "edrvfl.h"

#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "edrvfl/evaluation.hpp"
#include "edrvfl/serialize.hpp"

using nlohmann::json;

struct edrvfl_table {
  edrvfl::evaluation::TableData data;
};

struct edrvfl_model {
  edrvfl::network::EnsembleModel model;
};

namespace {

thread_local std::string g_last_error;

edrvfl_status map_code(edrvfl::ErrorCode code) {
  return static_cast<edrvfl_status>(static_cast<int>(code));
}

template <typename F>
edrvfl_status wrap(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return EDRVFL_OK;
  } catch (const edrvfl::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EDRVFL_E_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return EDRVFL_E_UNKNOWN;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw edrvfl::InvalidArgument(what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

edrvfl::network::HyperParams hyperparams_from_text(const char* text) {
  if (text == nullptr || *text == '\0') return {};
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw edrvfl::InvalidArgument("hyperparams must be a JSON object");
  }
  return edrvfl::network::hyperparams_from_json(j);
}

edrvfl::evaluation::GridSpec grid_from_json(const json& j) {
  using edrvfl::evaluation::GridSpec;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "coarse_default") return GridSpec::coarse_default();
    throw edrvfl::InvalidArgument("unknown named grid: " + name);
  }
  if (!j.is_object()) {
    throw edrvfl::InvalidArgument("grid must be an object or a named grid");
  }
  GridSpec g;
  if (j.contains("lambda")) g.lambda = j.at("lambda").get<std::vector<double>>();
  if (j.contains("n")) g.hidden_neurons = j.at("n").get<std::vector<int>>();
  if (j.contains("l_max")) g.max_layers = j.at("l_max").get<std::vector<int>>();
  if (j.contains("gamma")) g.gamma = j.at("gamma").get<std::vector<double>>();
  if (j.contains("alpha")) g.alpha = j.at("alpha").get<std::vector<double>>();
  if (j.contains("omega_r")) g.omega_r = j.at("omega_r").get<std::vector<double>>();
  if (j.contains("p")) g.prune_rate = j.at("p").get<std::vector<double>>();
  return g;
}

struct ProtocolConfig {
  edrvfl::evaluation::Variant variant;
  edrvfl::evaluation::GridSpec grid;
  edrvfl::network::HyperParams base;
  int folds = 4;
  double val_fraction = 0.25;
  std::uint64_t seed = 0;
  int repetitions = 10;
  int jobs = 1;
};

ProtocolConfig protocol_from_text(const char* text) {
  require(text != nullptr, "config_json is required");
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw edrvfl::InvalidArgument("config must be a JSON object");
  }
  ProtocolConfig cfg;
  if (!j.contains("variant")) {
    throw edrvfl::InvalidArgument("config is missing 'variant'");
  }
  cfg.variant =
      edrvfl::evaluation::variant_from_name(j.at("variant").get<std::string>());
  if (j.contains("grid")) {
    cfg.grid = grid_from_json(j.at("grid"));
  } else {
    cfg.grid = edrvfl::evaluation::GridSpec::coarse_default();
  }
  if (j.contains("hyperparams")) {
    cfg.base = edrvfl::network::hyperparams_from_json(j.at("hyperparams"));
  }
  cfg.folds = j.value("folds", cfg.folds);
  cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
  if (!j.contains("seed")) {
    throw edrvfl::InvalidArgument("config is missing 'seed'");
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.repetitions = j.value("repetitions", cfg.repetitions);
  cfg.jobs = j.value("jobs", cfg.jobs);
  return cfg;
}

json run_result_to_json(const edrvfl::evaluation::RunResult& r) {
  json reps = json::array();
  for (const auto& hp : r.chosen_per_seed) {
    reps.push_back(edrvfl::network::hyperparams_to_json(hp));
  }
  return json{{"format_version", "1"},
              {"dataset", r.dataset},
              {"variant", r.variant},
              {"folds", r.folds},
              {"per_fold_accuracies", r.per_fold_accuracies},
              {"per_seed_means", r.per_seed_means},
              {"mean_accuracy", r.mean_accuracy},
              {"std_accuracy", r.std_accuracy},
              {"chosen_hyperparams",
               edrvfl::network::hyperparams_to_json(r.chosen)},
              {"chosen_hyperparams_per_seed", reps},
              {"partition_seed", r.partition_seed},
              {"weight_seeds", r.weight_seeds}};
}

}  // namespace

extern "C" {

const char* edrvfl_version(void) { return "1.0.0"; }

const char* edrvfl_last_error(void) { return g_last_error.c_str(); }

void edrvfl_string_free(char* s) { delete[] s; }

void edrvfl_buffer_free(double* p) { delete[] p; }

edrvfl_status edrvfl_table_load_csv(const char* path,
                                    const char* label_column, int has_header,
                                    edrvfl_table** out) {
  return wrap([&] {
    require(path != nullptr && label_column != nullptr && out != nullptr,
            "path, label_column and out are required");
    const auto raw =
        edrvfl::dataset::load_csv(path, label_column, has_header != 0);
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    auto table = std::make_unique<edrvfl_table>();
    table->data = edrvfl::evaluation::table_from_raw(raw, name);
    *out = table.release();
  });
}

edrvfl_status edrvfl_table_from_memory(const double* features,
                                       const char* const* labels,
                                       int64_t rows, int64_t cols,
                                       edrvfl_table** out) {
  return wrap([&] {
    require(features != nullptr && labels != nullptr && out != nullptr,
            "features, labels and out are required");
    require(rows > 0 && cols > 0, "rows and cols must be positive");
    edrvfl::dataset::RawTable raw;
    raw.features.resize(rows, cols);
    for (int64_t i = 0; i < rows; ++i) {
      for (int64_t j = 0; j < cols; ++j) {
        raw.features(i, j) = features[i * cols + j];
      }
      require(labels[i] != nullptr, "labels must not contain NULL");
      raw.labels.emplace_back(labels[i]);
    }
    auto table = std::make_unique<edrvfl_table>();
    table->data = edrvfl::evaluation::table_from_raw(raw, "memory");
    *out = table.release();
  });
}

edrvfl_status edrvfl_table_set_name(edrvfl_table* table, const char* name) {
  return wrap([&] {
    require(table != nullptr && name != nullptr, "table and name required");
    table->data.name = name;
  });
}

void edrvfl_table_free(edrvfl_table* table) { delete table; }

int64_t edrvfl_table_rows(const edrvfl_table* table) {
  return table == nullptr ? 0 : table->data.features.rows();
}

int64_t edrvfl_table_features(const edrvfl_table* table) {
  return table == nullptr ? 0 : table->data.features.cols();
}

int32_t edrvfl_table_classes(const edrvfl_table* table) {
  return table == nullptr ? 0 : table->data.k;
}

const char* edrvfl_table_label_name(const edrvfl_table* table,
                                    int32_t class_index) {
  if (table == nullptr || class_index < 0 ||
      class_index >= static_cast<int32_t>(table->data.label_names.size())) {
    return nullptr;
  }
  return table->data.label_names[static_cast<std::size_t>(class_index)]
      .c_str();
}

edrvfl_status edrvfl_features_load_csv(const char* path, int has_header,
                                       const char* drop_column,
                                       double** out_data, int64_t* out_rows,
                                       int64_t* out_cols) {
  return wrap([&] {
    require(path != nullptr && out_data != nullptr && out_rows != nullptr &&
                out_cols != nullptr,
            "path and output pointers are required");
    const edrvfl::Matrix m = edrvfl::dataset::load_features_csv(
        path, has_header != 0, drop_column == nullptr ? "" : drop_column);
    double* buffer = new double[static_cast<std::size_t>(
        std::max<int64_t>(1, m.rows() * m.cols()))];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        buffer[i * m.cols() + j] = m(i, j);
      }
    }
    *out_data = buffer;
    *out_rows = m.rows();
    *out_cols = m.cols();
  });
}

edrvfl_status edrvfl_train(const edrvfl_table* table,
                           const char* hyperparams_json, const char* variant,
                           edrvfl_model** out_model, char** out_report_json) {
  return wrap([&] {
    require(table != nullptr && out_model != nullptr,
            "table and out_model are required");
    auto hp = hyperparams_from_text(hyperparams_json);
    if (variant != nullptr && *variant != '\0') {
      edrvfl::evaluation::enforce_variant(
          edrvfl::evaluation::variant_from_name(variant), hp, true);
    }
    const auto data = edrvfl::dataset::make_training_dataset(
        table->data.features, table->data.y, table->data.k,
        table->data.label_names);
    auto trained = edrvfl::network::train(data, hp);

    if (out_report_json != nullptr) {
      const auto ensemble_labels = edrvfl::network::aggregate_scores(
          trained.outputs.scores, hp.aggregation);
      json report{{"format_version", "1"},
                  {"dataset", table->data.name},
                  {"variant", variant == nullptr ? "" : variant},
                  {"hyperparams", edrvfl::network::hyperparams_to_json(hp)},
                  {"layer_training_accuracy", trained.layer_train_accuracy},
                  {"ensemble_training_accuracy",
                   edrvfl::evaluation::accuracy(ensemble_labels, data.y)},
                  {"warnings", trained.warnings}};
      *out_report_json = dup_string(report.dump());
    }
    auto model = std::make_unique<edrvfl_model>();
    model->model = std::move(trained.model);
    *out_model = model.release();
  });
}

edrvfl_status edrvfl_model_save(const edrvfl_model* model, const char* path) {
  return wrap([&] {
    require(model != nullptr && path != nullptr, "model and path required");
    edrvfl::network::save_model(model->model, path);
  });
}

edrvfl_status edrvfl_model_load(const char* path, edrvfl_model** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr, "path and out required");
    auto model = std::make_unique<edrvfl_model>();
    model->model = edrvfl::network::load_model(path);
    *out = model.release();
  });
}

void edrvfl_model_free(edrvfl_model* model) { delete model; }

int32_t edrvfl_model_layers(const edrvfl_model* model) {
  return model == nullptr ? 0
                          : static_cast<int32_t>(model->model.layers.size());
}

int64_t edrvfl_model_features(const edrvfl_model* model) {
  return model == nullptr ? 0 : model->model.input_features();
}

int32_t edrvfl_model_classes(const edrvfl_model* model) {
  return model == nullptr ? 0 : model->model.k;
}

const char* edrvfl_model_label_name(const edrvfl_model* model,
                                    int32_t class_index) {
  if (model == nullptr || class_index < 0 ||
      class_index >= static_cast<int32_t>(model->model.label_names.size())) {
    return nullptr;
  }
  return model->model.label_names[static_cast<std::size_t>(class_index)]
      .c_str();
}

edrvfl_status edrvfl_predict(const edrvfl_model* model, const double* features,
                             int64_t rows, int64_t cols, int32_t depth,
                             int32_t* out_labels) {
  return wrap([&] {
    require(model != nullptr, "model is required");
    require(rows >= 0 && cols >= 0, "negative dimensions");
    require(rows == 0 || (features != nullptr && out_labels != nullptr),
            "features and out_labels are required");
    if (rows == 0) return;
    edrvfl::Matrix x(rows, cols);
    for (int64_t i = 0; i < rows; ++i) {
      for (int64_t j = 0; j < cols; ++j) {
        x(i, j) = features[i * cols + j];
      }
    }
    const int use_depth =
        depth == 0 ? static_cast<int>(model->model.layers.size()) : depth;
    const edrvfl::IntVector labels =
        edrvfl::network::predict_prefix(model->model, x, use_depth);
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      out_labels[i] = labels(i);
    }
  });
}

edrvfl_status edrvfl_run_cv_json(const edrvfl_table* table,
                                 const char* config_json, char** out_json) {
  return wrap([&] {
    require(table != nullptr && out_json != nullptr,
            "table and out_json required");
    const ProtocolConfig cfg = protocol_from_text(config_json);
    const auto cv = edrvfl::evaluation::run_cv(
        table->data, cfg.variant, cfg.grid, cfg.folds, cfg.val_fraction,
        cfg.seed, cfg.seed, cfg.base);
    json j{{"format_version", "1"},
           {"dataset", table->data.name},
           {"variant", edrvfl::evaluation::variant_name(cfg.variant)},
           {"folds", cfg.folds},
           {"fold_test_accuracies", cv.fold_test_accuracy},
           {"mean_test_accuracy", cv.mean_test_accuracy},
           {"chosen_hyperparams",
            edrvfl::network::hyperparams_to_json(cv.chosen)},
           {"partition_seed", cv.partition_seed},
           {"weight_seed", cv.weight_seed}};
    *out_json = dup_string(j.dump());
  });
}

edrvfl_status edrvfl_repeat_runs_json(const edrvfl_table* table,
                                      const char* config_json,
                                      char** out_json) {
  return wrap([&] {
    require(table != nullptr && out_json != nullptr,
            "table and out_json required");
    const ProtocolConfig cfg = protocol_from_text(config_json);
    const auto result = edrvfl::evaluation::repeat_runs(
        table->data, cfg.variant, cfg.grid, cfg.repetitions, cfg.seed,
        cfg.folds, cfg.val_fraction, cfg.base, cfg.jobs);
    *out_json = dup_string(run_result_to_json(result).dump());
  });
}

edrvfl_status edrvfl_sweep_json(const edrvfl_table* table,
                                const char* config_json, char** out_json) {
  return wrap([&] {
    require(table != nullptr && out_json != nullptr,
            "table and out_json required");
    require(config_json != nullptr, "config_json is required");
    const json j = json::parse(config_json, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw edrvfl::InvalidArgument("config must be a JSON object");
    }
    const auto parameter = j.at("parameter").get<std::string>();
    const auto values = j.at("values").get<std::vector<double>>();
    if (!j.contains("seed")) {
      throw edrvfl::InvalidArgument("config is missing 'seed'");
    }
    const auto seed = j.at("seed").get<std::uint64_t>();
    const int folds = j.value("folds", 4);
    edrvfl::network::HyperParams fixed;
    if (j.contains("hyperparams")) {
      fixed = edrvfl::network::hyperparams_from_json(j.at("hyperparams"));
    }
    fixed.seed = seed;
    const auto points = edrvfl::evaluation::sweep(table->data, parameter,
                                                  values, fixed, folds, seed);
    json out{{"format_version", "1"},
             {"dataset", table->data.name},
             {"parameter", parameter},
             {"points", json::array()}};
    for (const auto& p : points) {
      out["points"].push_back({{"value", p.value}, {"accuracy", p.accuracy}});
    }
    *out_json = dup_string(out.dump());
  });
}

edrvfl_status edrvfl_average_ranks(const double* accuracy, int32_t methods,
                                   int32_t datasets, double* out_ranks) {
  return wrap([&] {
    require(accuracy != nullptr && out_ranks != nullptr,
            "accuracy and out_ranks required");
    require(methods > 0 && datasets > 0, "methods and datasets must be > 0");
    std::vector<std::vector<double>> matrix(
        static_cast<std::size_t>(methods),
        std::vector<double>(static_cast<std::size_t>(datasets)));
    for (int32_t i = 0; i < methods; ++i) {
      for (int32_t j = 0; j < datasets; ++j) {
        matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            accuracy[static_cast<std::size_t>(i) * datasets + j];
      }
    }
    const auto ranks = edrvfl::evaluation::average_ranks(matrix);
    for (int32_t i = 0; i < methods; ++i) {
      out_ranks[i] = ranks[static_cast<std::size_t>(i)];
    }
  });
}

edrvfl_status edrvfl_wilcoxon(const double* a, const double* b, int64_t n,
                              double* out_statistic, double* out_p_value) {
  return wrap([&] {
    require(a != nullptr && b != nullptr && out_statistic != nullptr &&
                out_p_value != nullptr,
            "all pointers are required");
    require(n > 0, "n must be positive");
    const std::vector<double> va(a, a + n);
    const std::vector<double> vb(b, b + n);
    const auto result = edrvfl::evaluation::wilcoxon_signed_rank(va, vb);
    *out_statistic = result.statistic;
    *out_p_value = result.p_value;
  });
}

}  // extern "C"
