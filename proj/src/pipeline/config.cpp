#include "elstm/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "elstm/error.hpp"

namespace elstm::pipeline {

using nlohmann::json;

namespace {

// Reads the known keys of one JSON object and rejects everything else.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + key + ": invalid value " + j_.at(key).dump());
        }
    }

    const json* object(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(where_ + key + ": unknown configuration key");
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field + ": " + message);
}

}  // namespace

std::string to_string(FeatureMode mode) { return mode == FeatureMode::daf ? "daf" : "latent"; }

std::string to_string(FitScope scope) {
    switch (scope) {
        case FitScope::train: return "train";
        case FitScope::test: return "test";
        case FitScope::both: return "both";
    }
    return "test";
}

void validate(const PipelineConfig& c) {
    require(c.contamination >= 0.0 && c.contamination <= 0.5, "contamination", "must lie in [0, 0.5]");
    require(c.lof_k >= 1, "lof_k", "must be >= 1");
    require(c.dae_layers.size() >= 2, "dae_layers", "needs at least two layers");
    for (std::size_t n : c.dae_layers) require(n >= 1, "dae_layers", "sizes must be >= 1");
    require(c.dae_layers.front() == c.dae_layers.back(), "dae_layers", "input and output sizes must match");
    require(c.max_removed_fraction >= 0.0 && c.max_removed_fraction <= 1.0, "max_removed_fraction",
            "must lie in [0, 1]");
    require(c.seq_len >= 1, "seq_len", "must be >= 1");
    require(c.train_stride >= 1, "train_stride", "must be >= 1");
    require(c.detect_stride >= 1, "detect_stride", "must be >= 1");
    require(c.latent_dim == 2, "latent_dim", "must be 2 (deep advanced features are 3-D)");
    require(c.train_fraction > 0.0 && c.train_fraction < 1.0, "train_fraction", "must lie in (0, 1)");
    require(c.batch_size >= 1, "batch_size", "must be >= 1");
    require(c.epoch_limit >= 1, "epoch_limit", "must be >= 1");
    require(c.patience >= 1, "patience", "must be >= 1");
    require(c.min_delta >= 0.0, "min_delta", "must be >= 0");
    require(c.adam.learning_rate > 0.0, "adam.learning_rate", "must be > 0");
    require(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0, "adam.beta1", "must lie in [0, 1)");
    require(c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0, "adam.beta2", "must lie in [0, 1)");
    require(c.adam.epsilon > 0.0, "adam.epsilon", "must be > 0");
    require(c.em.components == 2, "gmm.components", "must be 2 (normal / abnormal verdicts)");
    require(c.em.max_iterations >= 1, "gmm.max_iterations", "must be >= 1");
    require(c.em.tolerance > 0.0, "gmm.tolerance", "must be > 0");
    require(c.em.ridge >= 0.0, "gmm.ridge", "must be >= 0");
    require(c.em.restarts >= 1, "gmm.restarts", "must be >= 1");
    const SynthSettings& s = c.synth;
    require(s.n_samples >= 2, "synth.n_samples", "must be >= 2");
    require(s.train_samples >= 1 && s.train_samples < s.n_samples, "synth.train_samples",
            "must lie in [1, n_samples)");
    require(s.onset <= s.n_samples, "synth.onset", "must be <= n_samples");
    require(std::isfinite(s.drift_per_sample), "synth.drift_per_sample", "must be finite");
    require(s.noise_std >= 0.0, "synth.noise_std", "must be >= 0");
    require(s.missing_fraction >= 0.0 && s.missing_fraction <= 1.0, "synth.missing_fraction", "must lie in [0, 1]");
    require(s.spike_fraction >= 0.0 && s.spike_fraction <= 1.0, "synth.spike_fraction", "must lie in [0, 1]");
    require(s.spike_scale >= 0.0, "synth.spike_scale", "must be >= 0");
}

json to_json(const PipelineConfig& c) {
    return {{"seed", c.seed},
            {"use_selection", c.use_selection},
            {"use_lstm", c.use_lstm},
            {"feature_mode", to_string(c.feature_mode)},
            {"fit_on", to_string(c.fit_on)},
            {"contamination", c.contamination},
            {"lof_k", c.lof_k},
            {"dae_layers", c.dae_layers},
            {"max_removed_fraction", c.max_removed_fraction},
            {"seq_len", c.seq_len},
            {"train_stride", c.train_stride},
            {"detect_stride", c.detect_stride},
            {"latent_dim", c.latent_dim},
            {"train_fraction", c.train_fraction},
            {"batch_size", c.batch_size},
            {"epoch_limit", c.epoch_limit},
            {"patience", c.patience},
            {"min_delta", c.min_delta},
            {"adam",
             {{"learning_rate", c.adam.learning_rate},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"epsilon", c.adam.epsilon}}},
            {"gmm",
             {{"components", c.em.components},
              {"max_iterations", c.em.max_iterations},
              {"tolerance", c.em.tolerance},
              {"ridge", c.em.ridge},
              {"restarts", c.em.restarts},
              {"seed", c.em.seed}}},
            {"synth",
             {{"n_samples", c.synth.n_samples},
              {"train_samples", c.synth.train_samples},
              {"onset", c.synth.onset},
              {"drift_per_sample", c.synth.drift_per_sample},
              {"noise_std", c.synth.noise_std},
              {"missing_fraction", c.synth.missing_fraction},
              {"spike_fraction", c.synth.spike_fraction},
              {"spike_scale", c.synth.spike_scale}}}};
}

PipelineConfig from_json(const json& j) {
    PipelineConfig c;
    Reader r(j, "");
    r.get("seed", c.seed);
    r.get("use_selection", c.use_selection);
    r.get("use_lstm", c.use_lstm);
    std::string features = to_string(c.feature_mode);
    r.get("feature_mode", features);
    if (features == "daf") c.feature_mode = FeatureMode::daf;
    else if (features == "latent" || features == "latent_only") c.feature_mode = FeatureMode::latent_only;
    else throw ConfigError("feature_mode: expected daf or latent, got " + features);
    std::string fit_on = to_string(c.fit_on);
    r.get("fit_on", fit_on);
    if (fit_on == "train") c.fit_on = FitScope::train;
    else if (fit_on == "test") c.fit_on = FitScope::test;
    else if (fit_on == "both") c.fit_on = FitScope::both;
    else throw ConfigError("fit_on: expected train, test or both, got " + fit_on);
    r.get("contamination", c.contamination);
    r.get("lof_k", c.lof_k);
    r.get("dae_layers", c.dae_layers);
    r.get("max_removed_fraction", c.max_removed_fraction);
    r.get("seq_len", c.seq_len);
    r.get("train_stride", c.train_stride);
    r.get("detect_stride", c.detect_stride);
    r.get("latent_dim", c.latent_dim);
    r.get("train_fraction", c.train_fraction);
    r.get("batch_size", c.batch_size);
    r.get("epoch_limit", c.epoch_limit);
    r.get("patience", c.patience);
    r.get("min_delta", c.min_delta);
    if (const json* a = r.object("adam")) {
        Reader ra(*a, "adam.");
        ra.get("learning_rate", c.adam.learning_rate);
        ra.get("beta1", c.adam.beta1);
        ra.get("beta2", c.adam.beta2);
        ra.get("epsilon", c.adam.epsilon);
        ra.finish();
    }
    c.em.seed = c.seed;
    if (const json* g = r.object("gmm")) {
        Reader rg(*g, "gmm.");
        rg.get("components", c.em.components);
        rg.get("max_iterations", c.em.max_iterations);
        rg.get("tolerance", c.em.tolerance);
        rg.get("ridge", c.em.ridge);
        rg.get("restarts", c.em.restarts);
        rg.get("seed", c.em.seed);
        rg.finish();
    }
    if (const json* s = r.object("synth")) {
        Reader rs(*s, "synth.");
        rs.get("n_samples", c.synth.n_samples);
        rs.get("train_samples", c.synth.train_samples);
        rs.get("onset", c.synth.onset);
        rs.get("drift_per_sample", c.synth.drift_per_sample);
        rs.get("noise_std", c.synth.noise_std);
        rs.get("missing_fraction", c.synth.missing_fraction);
        rs.get("spike_fraction", c.synth.spike_fraction);
        rs.get("spike_scale", c.synth.spike_scale);
        rs.finish();
    }
    r.finish();
    validate(c);
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

num::TrainingSchedule schedule(const PipelineConfig& c) {
    num::TrainingSchedule s;
    s.batch_size = c.batch_size;
    s.epoch_limit = c.epoch_limit;
    s.patience = c.patience;
    s.min_delta = c.min_delta;
    s.adam = c.adam;
    return s;
}

dae::LofConfig lof_config(const PipelineConfig& c) { return {c.lof_k, c.contamination}; }

gmm::EmConfig em_config(const PipelineConfig& c) { return c.em; }

data::SynthConfig synth_config(const PipelineConfig& c) {
    data::SynthConfig s = data::default_synth_config(c.seed);
    s.n_samples = c.synth.n_samples;
    s.onset = c.synth.onset;
    s.noise_std = c.synth.noise_std;
    s.missing_fraction = c.synth.missing_fraction;
    s.spike_fraction = c.synth.spike_fraction;
    s.spike_scale = c.synth.spike_scale;
    s.spike_end = c.synth.train_samples;
    for (std::size_t j = 0; j < s.features; ++j) {
        if (s.affected[j]) s.drift_rate[j] = std::copysign(c.synth.drift_per_sample * s.scales[j], s.drift_rate[j]);
    }
    return s;
}

}  // namespace elstm::pipeline
