#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elstm/daelof/refine.hpp"
#include "elstm/datapipe/synth.hpp"
#include "elstm/gmm/gmm.hpp"
#include "elstm/numkernel/adam.hpp"
#include "elstm/numkernel/trainer.hpp"

namespace elstm::pipeline {

enum class FeatureMode { daf, latent_only };
enum class FitScope { train, test, both };

std::string to_string(FeatureMode mode);
std::string to_string(FitScope scope);

/// Knobs of the bundled synthetic scenario; everything else comes from
/// default_synth_config(seed).
struct SynthSettings {
    std::size_t n_samples = 30000;
    /// Rows [0, train_samples) form the training CSV, the rest the test CSV.
    std::size_t train_samples = 20000;
    std::size_t onset = 26000;
    /// Drift of each affected sensor, in multiples of its scale per sample.
    double drift_per_sample = 4e-3;
    double noise_std = 0.1;
    double missing_fraction = 0.001;
    double spike_fraction = 0.02;
    double spike_scale = 3.0;
};

struct PipelineConfig {
    std::uint64_t seed = 42;

    bool use_selection = true;
    bool use_lstm = true;
    FeatureMode feature_mode = FeatureMode::daf;
    FitScope fit_on = FitScope::test;

    double contamination = 0.2;
    std::size_t lof_k = 20;
    std::vector<std::size_t> dae_layers = {19, 16, 10, 8, 4, 8, 10, 16, 19};
    double max_removed_fraction = 0.5;

    std::size_t seq_len = 100;
    std::size_t train_stride = 1;
    std::size_t detect_stride = 1;
    std::size_t latent_dim = 2;
    double train_fraction = 0.8;

    std::size_t batch_size = 64;
    std::size_t epoch_limit = 20000;
    std::size_t patience = 100;
    double min_delta = 0.0;
    num::AdamConfig adam;

    /// em.seed follows `seed` unless the config sets gmm.seed.
    gmm::EmConfig em;
    SynthSettings synth;
};

/// Throws ConfigError naming the first offending field.
void validate(const PipelineConfig& cfg);

/// Every field with its resolved value; from_json(to_json(c)) == c.
nlohmann::json to_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults; unknown keys and ill-typed values raise ConfigError.
PipelineConfig from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

num::TrainingSchedule schedule(const PipelineConfig& cfg);
dae::LofConfig lof_config(const PipelineConfig& cfg);
gmm::EmConfig em_config(const PipelineConfig& cfg);
data::SynthConfig synth_config(const PipelineConfig& cfg);

}  // namespace elstm::pipeline
