#pragma once

#include <json.hpp>

#include "elstm/numkernel/matrix.hpp"
#include "elstm/numkernel/param_set.hpp"

namespace elstm::num {

/// {"rows", "cols", "data"} with data row-major.
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

/// Array of {"name", "value"} in insertion order.
nlohmann::json to_json(const ParamSet& params);
ParamSet params_from_json(const nlohmann::json& j);

}  // namespace elstm::num
