#pragma once

#include <cstdint>

#include "elstm/datapipe/windows.hpp"
#include "elstm/lstmvae/model.hpp"
#include "elstm/numkernel/trainer.hpp"

namespace elstm::vae {

struct VaeTrainConfig {
    VaeDims dims;
    Architecture architecture = Architecture::lstm;
    num::TrainingSchedule schedule;
    /// Fraction of windows (chronologically first) used for fitting; the rest validate.
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
};

struct VaeTrainResult {
    LstmVaeModel model;
    num::TrainingHistory history;
};

/// Fits an LSTMVAE on `windows`: chronological train/validation split, Adam
/// over shuffled minibatches with a fresh eps per window per step, validation
/// on the deterministic (eps = 0) loss, best checkpoint returned.
VaeTrainResult train(const data::WindowSet& windows, const VaeTrainConfig& config);

}  // namespace elstm::vae
