#include "elstm/pipeline/bundle.hpp"

#include <fstream>

#include "elstm/error.hpp"
#include "elstm/lstmvae/serialize.hpp"
#include "elstm/numkernel/param_json.hpp"

namespace elstm::pipeline {

using nlohmann::json;

json to_json(const Bundle& b) {
    json daf = json::array();
    for (const auto& p : b.train_daf) daf.push_back({p.mu1, p.mu2, p.e_rec});
    return {{"format", "elstm-bundle"},
            {"version", kBundleVersion},
            {"config", to_json(b.config)},
            {"feature_names", b.feature_names},
            {"dae", {{"layers", b.dae.layers()}, {"params", num::to_json(b.dae.params())}}},
            {"vae", vae::to_json(b.vae)},
            {"train_daf", daf}};
}

Bundle bundle_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "elstm-bundle") throw ConfigError("not a model bundle");
        if (j.at("version").get<int>() != kBundleVersion) {
            throw ConfigError("unsupported bundle version " + j.at("version").dump());
        }
        Bundle b;
        b.config = from_json(j.at("config"));
        b.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const json& jd = j.at("dae");
        b.dae = dae::DaeModel::restore(jd.at("layers").get<std::vector<std::size_t>>(),
                                       num::params_from_json(jd.at("params")));
        b.vae = vae::model_from_json(j.at("vae"));
        for (const json& p : j.at("train_daf")) {
            const auto v = p.get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("bundle: train_daf rows must have 3 entries");
            b.train_daf.push_back({v[0], v[1], v[2]});
        }
        if (b.feature_names.size() != b.vae.dims().features) {
            throw ConfigError("bundle: feature list does not match the model input size");
        }
        return b;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bundle: ") + e.what());
    }
}

void save_bundle(const Bundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "bundle.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json(b).dump(1) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

Bundle load_bundle(const std::filesystem::path& path) {
    const auto file = std::filesystem::is_directory(path) ? path / "bundle.json" : path;
    std::ifstream in(file);
    if (!in) throw IoError("cannot read bundle " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bundle " + file.string() + ": " + e.what());
    }
    return bundle_from_json(j);
}

}  // namespace elstm::pipeline
