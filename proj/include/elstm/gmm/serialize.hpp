#pragma once

#include <json.hpp>

#include "elstm/gmm/gmm.hpp"

namespace elstm::gmm {

nlohmann::json to_json(const GmmModel& model);
nlohmann::json to_json(const EmConfig& cfg);
GmmModel model_from_json(const nlohmann::json& j);

}  // namespace elstm::gmm
