#pragma once

#include <cstdint>

#include "elstm/numkernel/param_set.hpp"

namespace elstm::num {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators shaped like the parameters they track.
class AdamState {
public:
    AdamState(AdamConfig config, const ParamSet& params);

    const AdamConfig& config() const noexcept { return config_; }
    std::uint64_t steps() const noexcept { return steps_; }
    const ParamSet& first_moment() const noexcept { return m_; }
    const ParamSet& second_moment() const noexcept { return v_; }

private:
    friend void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads);

    AdamConfig config_;
    ParamSet m_;
    ParamSet v_;
    std::uint64_t steps_ = 0;
};

/// One bias-corrected Adam update. A parameter whose gradient is identically
/// zero is left untouched together with its moments, so a zero gradient set
/// is the identity on the parameters regardless of accumulated momentum.
void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads);

}  // namespace elstm::num
