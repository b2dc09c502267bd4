#include "elstm/numkernel/param_json.hpp"

#include "elstm/error.hpp"

namespace elstm::num {

using nlohmann::json;

json to_json(const Matrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}}; }

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw ConfigError("matrix data holds " + std::to_string(data.size()) + " values for shape " +
                          std::to_string(rows) + "x" + std::to_string(cols));
    }
    return Matrix(rows, cols, std::move(data));
}

json to_json(const ParamSet& params) {
    json out = json::array();
    for (const auto& e : params) out.push_back({{"name", e.name}, {"value", to_json(e.value)}});
    return out;
}

ParamSet params_from_json(const json& j) {
    ParamSet params;
    for (const json& p : j) params.add(p.at("name").get<std::string>(), matrix_from_json(p.at("value")));
    return params;
}

}  // namespace elstm::num
