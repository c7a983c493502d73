#include "edrvfl/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace edrvfl::network {

using nlohmann::json;

json hyperparams_to_json(const HyperParams& hp) {
  return json{{"lambda", hp.lambda},
              {"n", hp.hidden_neurons},
              {"l_max", hp.max_layers},
              {"gamma", hp.gamma},
              {"alpha", hp.alpha},
              {"omega_r", hp.omega_r},
              {"p", hp.prune_rate},
              {"activation", activation_name(hp.activation)},
              {"aggregation", aggregation_name(hp.aggregation)},
              {"epsilon", hp.epsilon},
              {"include_bias", hp.include_bias},
              {"seed", hp.seed}};
}

HyperParams hyperparams_from_json(const json& j) {
  HyperParams hp;
  hp.lambda = j.value("lambda", hp.lambda);
  hp.hidden_neurons = j.value("n", hp.hidden_neurons);
  hp.max_layers = j.value("l_max", hp.max_layers);
  hp.gamma = j.value("gamma", hp.gamma);
  hp.alpha = j.value("alpha", hp.alpha);
  hp.omega_r = j.value("omega_r", hp.omega_r);
  hp.prune_rate = j.value("p", hp.prune_rate);
  if (j.contains("activation")) {
    hp.activation = activation_from_name(j.at("activation").get<std::string>());
  }
  if (j.contains("aggregation")) {
    hp.aggregation =
        aggregation_from_name(j.at("aggregation").get<std::string>());
  }
  hp.epsilon = j.value("epsilon", hp.epsilon);
  hp.include_bias = j.value("include_bias", hp.include_bias);
  hp.seed = j.value("seed", hp.seed);
  hp.validate();
  return hp;
}

json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(m(r, c));
    }
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 ||
      static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw IoError("matrix payload size does not match its dimensions");
  }
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = data[i++];
    }
  }
  return m;
}

namespace {

json vector_to_json(const Vector& v) {
  std::vector<double> data(v.data(), v.data() + v.size());
  return json(data);
}

Vector vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = data[i];
  }
  return v;
}

json layer_to_json(const LayerModel& layer) {
  json j;
  j["W"] = matrix_to_json(layer.W);
  if (layer.has_bias()) {
    std::vector<double> bias(layer.bias_row.data(),
                             layer.bias_row.data() + layer.bias_row.size());
    j["bias_row"] = bias;
  } else {
    j["bias_row"] = nullptr;
  }
  j["bn_stats"] = json{{"mu", vector_to_json(layer.bn_stats.mu)},
                       {"sigma2", vector_to_json(layer.bn_stats.sigma2)},
                       {"epsilon", layer.bn_stats.epsilon}};
  std::vector<bool> keep(layer.keep_mask.begin(), layer.keep_mask.end());
  j["keep_mask"] = keep;
  j["beta"] = matrix_to_json(layer.beta);
  return j;
}

LayerModel layer_from_json(const json& j) {
  LayerModel layer;
  layer.W = matrix_from_json(j.at("W"));
  if (!j.at("bias_row").is_null()) {
    const auto bias = j.at("bias_row").get<std::vector<double>>();
    layer.bias_row.resize(static_cast<Eigen::Index>(bias.size()));
    for (std::size_t i = 0; i < bias.size(); ++i) {
      layer.bias_row(static_cast<Eigen::Index>(i)) = bias[i];
    }
  }
  const json& bn = j.at("bn_stats");
  layer.bn_stats.mu = vector_from_json(bn.at("mu"));
  layer.bn_stats.sigma2 = vector_from_json(bn.at("sigma2"));
  layer.bn_stats.epsilon = bn.at("epsilon").get<double>();
  const auto keep = j.at("keep_mask").get<std::vector<bool>>();
  layer.keep_mask.assign(keep.begin(), keep.end());
  layer.beta = matrix_from_json(j.at("beta"));
  return layer;
}

void validate_model(const EnsembleModel& model) {
  const Eigen::Index d = model.norm_stats.mean.size();
  if (model.norm_stats.sigma.size() != d) {
    throw IoError("norm_stats mean/sigma length mismatch");
  }
  if (model.k < 2 ||
      static_cast<int>(model.label_names.size()) != model.k) {
    throw IoError("label_names inconsistent with class count");
  }
  if (model.layers.empty()) throw IoError("model has no layers");
  const int n = model.hyperparams.hidden_neurons;
  Eigen::Index expected_in = d;
  for (const LayerModel& layer : model.layers) {
    if (layer.W.rows() != expected_in || layer.W.cols() != n) {
      throw IoError("layer weight shape inconsistent");
    }
    if (layer.has_bias() && layer.bias_row.size() != n) {
      throw IoError("bias length inconsistent");
    }
    if (layer.bn_stats.mu.size() != n || layer.bn_stats.sigma2.size() != n) {
      throw IoError("batch-norm statistics length inconsistent");
    }
    if (static_cast<int>(layer.keep_mask.size()) != n ||
        layer.kept_count() < 1) {
      throw IoError("keep mask inconsistent");
    }
    if (layer.beta.rows() != n + d || layer.beta.cols() != model.k) {
      throw IoError("output weight shape inconsistent");
    }
    expected_in = layer.kept_count() + d;
  }
}

}  // namespace

void save_model(const EnsembleModel& model, const std::string& path) {
  json j;
  j["format_version"] = "1";
  j["hyperparams"] = hyperparams_to_json(model.hyperparams);
  j["norm_stats"] = json{{"mean", vector_to_json(model.norm_stats.mean)},
                         {"sigma", vector_to_json(model.norm_stats.sigma)}};
  j["label_names"] = model.label_names;
  json layers = json::array();
  for (const LayerModel& layer : model.layers) {
    layers.push_back(layer_to_json(layer));
  }
  j["layers"] = std::move(layers);

  // Write to a sibling temp file and rename so readers never see a partial
  // model.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << j.dump();
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("failed to write: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("failed to move model into place: " + ec.message());
  }
}

EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  const json j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw IoError("model file is not valid JSON: " + path);
  }
  if (!j.contains("format_version") || !j.at("format_version").is_string() ||
      j.at("format_version").get<std::string>() != "1") {
    throw FormatVersionMismatch("expected model format_version \"1\"");
  }

  try {
    EnsembleModel model;
    model.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    const json& norm = j.at("norm_stats");
    model.norm_stats.mean = vector_from_json(norm.at("mean"));
    model.norm_stats.sigma = vector_from_json(norm.at("sigma"));
    model.label_names =
        j.at("label_names").get<std::vector<std::string>>();
    model.k = static_cast<int>(model.label_names.size());
    for (const json& layer : j.at("layers")) {
      model.layers.push_back(layer_from_json(layer));
    }
    validate_model(model);
    return model;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("malformed model file: " + std::string(e.what()));
  }
}

}  // namespace edrvfl::network
