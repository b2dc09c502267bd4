#include "elstm/gmm/serialize.hpp"

#include <string>

namespace elstm::gmm {

using nlohmann::json;

json to_json(const GmmModel& model) {
    json covs = json::array();
    for (const auto& c : model.covariances) covs.push_back(c.values());
    json labels = json::array();
    for (auto l : model.labels) labels.push_back(std::string(data::to_string(l)));
    return {{"components", model.components()},
            {"dimension", model.dimension()},
            {"weights", model.weights},
            {"means", model.means},
            {"covariances", covs},
            {"labels", labels}};
}

json to_json(const EmConfig& cfg) {
    return {{"components", cfg.components}, {"max_iterations", cfg.max_iterations}, {"tolerance", cfg.tolerance},
            {"ridge", cfg.ridge},           {"restarts", cfg.restarts},             {"seed", cfg.seed}};
}

GmmModel model_from_json(const json& j) {
    try {
        GmmModel m;
        const auto d = j.at("dimension").get<std::size_t>();
        m.weights = j.at("weights").get<std::vector<double>>();
        m.means = j.at("means").get<std::vector<std::vector<double>>>();
        for (const json& c : j.at("covariances")) {
            auto values = c.get<std::vector<double>>();
            if (values.size() != d * d) throw ConfigError("GMM file: covariance size does not match dimension");
            m.covariances.emplace_back(d, d, std::move(values));
        }
        for (const json& l : j.at("labels")) {
            const auto parsed = data::parse_label_name(l.get<std::string>());
            if (!parsed) throw ConfigError("GMM file: unknown label " + l.dump());
            m.labels.push_back(*parsed);
        }
        if (m.means.size() != m.weights.size() || m.covariances.size() != m.weights.size()) {
            throw ConfigError("GMM file: component counts disagree");
        }
        for (const auto& mean : m.means) {
            if (mean.size() != d) throw ConfigError("GMM file: mean size does not match dimension");
        }
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("GMM file: ") + e.what());
    }
}

}  // namespace elstm::gmm
