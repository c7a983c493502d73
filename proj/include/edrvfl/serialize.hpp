#pragma once

#include <json.hpp>

#include "edrvfl/network.hpp"

namespace edrvfl::network {

nlohmann::json hyperparams_to_json(const HyperParams& hp);
HyperParams hyperparams_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace edrvfl::network
