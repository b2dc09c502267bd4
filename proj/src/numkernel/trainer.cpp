#include "elstm/numkernel/trainer.hpp"

#include <cmath>
#include <numeric>

#include "elstm/error.hpp"
#include "elstm/log.hpp"

namespace elstm::num {

bool EarlyStopping::observe(double val_loss) {
    if (!seen_ || val_loss < best_ - min_delta_) {
        best_ = val_loss;
        seen_ = true;
        stale_ = 0;
        return true;
    }
    ++stale_;
    return false;
}

void validate(const TrainingSchedule& schedule) {
    if (schedule.batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (schedule.epoch_limit == 0) throw ConfigError("epoch_limit must be >= 1");
    if (schedule.patience == 0) throw ConfigError("patience must be >= 1");
    if (!(schedule.min_delta >= 0.0)) throw ConfigError("min_delta must be >= 0");
}

TrainingHistory train_minibatch(ParamSet& params, std::size_t n_train, const TrainingSchedule& schedule,
                                Rng shuffle_rng, const BatchLoss& batch_loss,
                                const ValidationLoss& validation_loss, const std::string& what) {
    validate(schedule);
    if (n_train == 0) throw TrainingError(what + ": empty training set");

    AdamState adam(schedule.adam, params);
    EarlyStopping stopper(schedule.patience, schedule.min_delta);
    TrainingHistory history;
    ParamSet best = params;

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < schedule.epoch_limit; ++epoch) {
        shuffle_rng.shuffle(order);
        double weighted = 0.0;
        for (std::size_t start = 0; start < n_train; start += schedule.batch_size) {
            const std::size_t count = std::min(schedule.batch_size, n_train - start);
            std::span<const std::size_t> batch(order.data() + start, count);
            Tape tape(params);
            Var loss = batch_loss(tape, batch);
            const double value = loss.value()[0];
            if (!std::isfinite(value)) {
                throw TrainingError(what + ": non-finite training loss at epoch " + std::to_string(epoch));
            }
            weighted += value * static_cast<double>(count);
            ParamSet grads = tape.backward(loss);
            adam_step(adam, params, grads);
        }
        const double train_loss = weighted / static_cast<double>(n_train);
        const double val_loss = validation_loss(params);
        if (!std::isfinite(val_loss)) {
            throw TrainingError(what + ": non-finite validation loss at epoch " + std::to_string(epoch));
        }
        history.epochs.push_back({epoch, train_loss, val_loss});
        if (stopper.observe(val_loss)) {
            best = params;
            history.best_epoch = epoch;
            history.best_val_loss = val_loss;
        }
        log::debug(what + " epoch " + std::to_string(epoch) + " train " + std::to_string(train_loss) + " val " +
                   std::to_string(val_loss));
        if (stopper.should_stop()) {
            history.stopped_early = true;
            break;
        }
    }
    params = std::move(best);
    return history;
}

}  // namespace elstm::num
