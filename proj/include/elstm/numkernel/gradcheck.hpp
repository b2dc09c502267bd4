#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "elstm/numkernel/param_set.hpp"
#include "elstm/numkernel/tape.hpp"

namespace elstm::num {

/// Builds a scalar loss on a tape bound to the parameters being checked.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t entries_checked = 0;
    /// Entries whose gradient magnitude is under the floor, where the check is
    /// effectively absolute: |a - n| / floor.
    std::size_t entries_below_floor = 0;
    double max_absolute_error_below_floor = 0.0;
};

/// Compares backward() against central differences (f(p+h) - f(p-h)) / 2h
/// for every parameter entry. Relative error is |a - n| / max(|a|, |n|, floor).
/// Central differences resolve a derivative only to about 1e-16 * |f| / h, so
/// gradients far below that need a floor near the loss scale times 1e-6.
/// Any randomness inside `loss` must be frozen by the caller; a loss that
/// evaluates differently twice at the same point raises OracleViolation.
GradCheckResult finite_difference_check(const LossBuilder& loss, const ParamSet& params, double h = 1e-5,
                                        double floor = 1e-8);

}  // namespace elstm::num
