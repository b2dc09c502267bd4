#include "elstm/numkernel/adam.hpp"

#include <algorithm>
#include <cmath>

#include "elstm/error.hpp"

namespace elstm::num {

AdamState::AdamState(AdamConfig config, const ParamSet& params)
    : config_(config), m_(ParamSet::zeros_like(params)), v_(ParamSet::zeros_like(params)) {
    if (!(config.learning_rate > 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
        !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.epsilon > 0.0)) {
        throw ConfigError("Adam: learning_rate and epsilon must be > 0, betas in [0, 1)");
    }
}

void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads) {
    if (!params.same_layout(grads)) {
        throw ConfigError("adam_step: gradient keys/shapes do not match the parameter set");
    }
    if (!params.same_layout(state.m_)) {
        throw ConfigError("adam_step: optimizer state was built for a different parameter set");
    }
    const AdamConfig& cfg = state.config_;
    ++state.steps_;
    const double t = static_cast<double>(state.steps_);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        const Matrix& g = grads.entry(i).value;
        if (std::all_of(g.values().begin(), g.values().end(), [](double x) { return x == 0.0; })) {
            continue;
        }
        Matrix& p = params.entry(i).value;
        Matrix& m = state.m_.entry(i).value;
        Matrix& v = state.v_.entry(i).value;
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            p[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
    }
}

}  // namespace elstm::num
