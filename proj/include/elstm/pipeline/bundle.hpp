#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elstm/daelof/dae.hpp"
#include "elstm/lstmvae/model.hpp"
#include "elstm/pipeline/config.hpp"

namespace elstm::pipeline {

inline constexpr int kBundleVersion = 1;

/// Everything detect needs from a training run.
struct Bundle {
    PipelineConfig config;
    std::vector<std::string> feature_names;
    dae::DaeModel dae;
    vae::LstmVaeModel vae;
    /// DAF of the (refined) training windows, for fitting the mixture on train data.
    std::vector<vae::DafPoint> train_daf;
};

nlohmann::json to_json(const Bundle& bundle);
Bundle bundle_from_json(const nlohmann::json& j);

/// Writes <dir>/bundle.json.
void save_bundle(const Bundle& bundle, const std::filesystem::path& dir);
/// Accepts the bundle directory or the bundle.json file itself.
Bundle load_bundle(const std::filesystem::path& path);

}  // namespace elstm::pipeline
