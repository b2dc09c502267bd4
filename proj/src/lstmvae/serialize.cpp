#include "elstm/lstmvae/serialize.hpp"

#include <fstream>

#include "elstm/error.hpp"
#include "elstm/numkernel/param_json.hpp"

namespace elstm::vae {

using nlohmann::json;

json to_json(const LstmVaeModel& model) {
    const VaeDims& d = model.dims();
    const auto& norm = model.normalization();
    return {{"format", "elstm-vae"},
            {"version", kModelFormatVersion},
            {"architecture", model.architecture() == Architecture::lstm ? "lstm" : "flat"},
            {"seed", model.seed()},
            {"dims",
             {{"features", d.features},
              {"seq_len", d.seq_len},
              {"enc_hidden1", d.enc_hidden1},
              {"enc_hidden2", d.enc_hidden2},
              {"enc_dense", d.enc_dense},
              {"latent", d.latent},
              {"dec_hidden1", d.dec_hidden1},
              {"dec_hidden2", d.dec_hidden2}}},
            {"normalization", {{"mean", norm.mean}, {"stddev", norm.stddev}, {"floored", norm.floored}}},
            {"params", num::to_json(model.params())}};
}

LstmVaeModel model_from_json(const json& j) {
    try {
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw ConfigError("model file: unsupported version " + j.at("version").dump());
        }
        const json& jd = j.at("dims");
        VaeDims d;
        d.features = jd.at("features").get<std::size_t>();
        d.seq_len = jd.at("seq_len").get<std::size_t>();
        d.enc_hidden1 = jd.at("enc_hidden1").get<std::size_t>();
        d.enc_hidden2 = jd.at("enc_hidden2").get<std::size_t>();
        d.enc_dense = jd.at("enc_dense").get<std::size_t>();
        d.latent = jd.at("latent").get<std::size_t>();
        d.dec_hidden1 = jd.at("dec_hidden1").get<std::size_t>();
        d.dec_hidden2 = jd.at("dec_hidden2").get<std::size_t>();
        const auto arch_name = j.at("architecture").get<std::string>();
        if (arch_name != "lstm" && arch_name != "flat") throw ConfigError("model file: unknown architecture " + arch_name);
        const Architecture arch = arch_name == "lstm" ? Architecture::lstm : Architecture::flat;

        num::ParamSet params = num::params_from_json(j.at("params"));
        data::NormalizationStats norm;
        const json& jn = j.at("normalization");
        norm.mean = jn.at("mean").get<std::vector<double>>();
        norm.stddev = jn.at("stddev").get<std::vector<double>>();
        norm.floored = jn.at("floored").get<std::vector<std::size_t>>();
        return LstmVaeModel::restore(d, arch, j.at("seed").get<std::uint64_t>(), std::move(params), std::move(norm));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
}

void save_model(const LstmVaeModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json(model).dump(1) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

LstmVaeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace elstm::vae
