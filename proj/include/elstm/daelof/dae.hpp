#pragma once

#include <cstdint>
#include <vector>

#include "elstm/numkernel/matrix.hpp"
#include "elstm/numkernel/param_set.hpp"
#include "elstm/numkernel/tape.hpp"
#include "elstm/numkernel/trainer.hpp"

namespace elstm::dae {

enum class Activation { tanh, linear };

/// Dense autoencoder. `layers` lists neuron counts from input to output,
/// e.g. 19-16-10-8-4-8-10-16-19; hidden layers use tanh, the output is linear.
class DaeModel {
public:
    DaeModel() = default;
    static DaeModel create(std::vector<std::size_t> layers, std::uint64_t seed);
    static DaeModel restore(std::vector<std::size_t> layers, num::ParamSet params);

    const std::vector<std::size_t>& layers() const noexcept { return layers_; }
    std::size_t features() const noexcept { return layers_.front(); }
    Activation activation(std::size_t layer) const noexcept {
        return layer + 2 == layers_.size() ? Activation::linear : Activation::tanh;
    }
    const num::ParamSet& params() const noexcept { return params_; }
    num::ParamSet& params() noexcept { return params_; }

    num::Var forward(num::Tape& tape, num::Var x) const;
    num::Matrix reconstruct(const num::Matrix& samples) const;

private:
    std::vector<std::size_t> layers_;
    num::ParamSet params_;
};

std::vector<std::size_t> default_dae_layers();

struct DaeTrainConfig {
    std::vector<std::size_t> layers = default_dae_layers();
    num::TrainingSchedule schedule;
    std::uint64_t seed = 42;
};

struct DaeTrainResult {
    DaeModel model;
    num::TrainingHistory history;
};

/// Minimizes the mean squared reconstruction error with Adam and early
/// stopping on `val`; returns the best-validation checkpoint.
DaeTrainResult dae_train(const num::Matrix& train, const num::Matrix& val, const DaeTrainConfig& config);

/// Mean over features of the squared reconstruction difference, per sample row.
std::vector<double> reconstruction_errors(const DaeModel& model, const num::Matrix& samples);

/// Mean of reconstruction_errors over all rows.
double reconstruction_loss(const DaeModel& model, const num::Matrix& samples);

}  // namespace elstm::dae
