#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "elstm/numkernel/adam.hpp"
#include "elstm/numkernel/param_set.hpp"
#include "elstm/numkernel/rng.hpp"
#include "elstm/numkernel/tape.hpp"

namespace elstm::num {

/// Shared minibatch/early-stopping schedule for every trained network.
struct TrainingSchedule {
    std::size_t batch_size = 64;
    std::size_t epoch_limit = 20000;
    /// Consecutive validations without improvement before stopping.
    std::size_t patience = 100;
    /// A validation loss counts as an improvement only if it beats the best
    /// so far by more than this absolute margin.
    double min_delta = 0.0;
    AdamConfig adam;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainingHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    bool stopped_early = false;
};

class EarlyStopping {
public:
    EarlyStopping(std::size_t patience, double min_delta) : patience_(patience), min_delta_(min_delta) {}

    /// Records one validation loss; true when it is a new best.
    bool observe(double val_loss);
    bool should_stop() const noexcept { return stale_ >= patience_; }
    double best() const noexcept { return best_; }

private:
    std::size_t patience_;
    double min_delta_;
    double best_ = 0.0;
    bool seen_ = false;
    std::size_t stale_ = 0;
};

/// Mean loss of one minibatch, recorded on a tape bound to the parameters.
using BatchLoss = std::function<Var(Tape&, std::span<const std::size_t> batch)>;
using ValidationLoss = std::function<double(const ParamSet&)>;

/// Adam over shuffled minibatches with per-epoch validation. On return
/// `params` holds the best-validation checkpoint. A non-finite loss raises
/// TrainingError naming `what` and the epoch.
TrainingHistory train_minibatch(ParamSet& params, std::size_t n_train, const TrainingSchedule& schedule,
                                Rng shuffle_rng, const BatchLoss& batch_loss,
                                const ValidationLoss& validation_loss, const std::string& what);

void validate(const TrainingSchedule& schedule);

}  // namespace elstm::num
