#include "elstm/numkernel/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "elstm/error.hpp"

namespace elstm::num {

namespace {

double evaluate(const LossBuilder& loss, const ParamSet& params) {
    Tape tape(params);
    const Matrix& value = loss(tape).value();
    if (value.rows() != 1 || value.cols() != 1) {
        throw DimensionError("finite_difference_check: loss must be 1x1, got " + value.shape_string());
    }
    return value[0];
}

}  // namespace

GradCheckResult finite_difference_check(const LossBuilder& loss, const ParamSet& params, double h,
                                        double floor) {
    if (!(h > 0.0)) throw ConfigError("finite_difference_check: step h must be > 0");
    if (!(floor > 0.0)) throw ConfigError("finite_difference_check: denominator floor must be > 0");

    const double first = evaluate(loss, params);
    const double second = evaluate(loss, params);
    if (first != second) {
        throw OracleViolation("finite_difference_check: loss is not deterministic (" + std::to_string(first) +
                              " vs " + std::to_string(second) + ")");
    }

    ParamSet analytic;
    {
        Tape tape(params);
        analytic = tape.backward(loss(tape));
    }

    GradCheckResult result;
    ParamSet probe = params;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        Matrix& value = probe.entry(i).value;
        const Matrix& grad = analytic.entry(i).value;
        for (std::size_t j = 0; j < value.size(); ++j) {
            const double original = value[j];
            value[j] = original + h;
            const double up = evaluate(loss, probe);
            value[j] = original - h;
            const double down = evaluate(loss, probe);
            value[j] = original;

            const double numeric = (up - down) / (2.0 * h);
            const double a = grad[j];
            const double denom = std::max({std::abs(a), std::abs(numeric), floor});
            const double rel = std::abs(a - numeric) / denom;
            ++result.entries_checked;
            if (std::max(std::abs(a), std::abs(numeric)) < floor) {
                ++result.entries_below_floor;
                result.max_absolute_error_below_floor =
                    std::max(result.max_absolute_error_below_floor, std::abs(a - numeric));
            }
            if (result.worst_param.empty() || rel > result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst_param = probe.entry(i).name;
                result.worst_index = j;
                result.analytic = a;
                result.numeric = numeric;
            }
        }
    }
    return result;
}

}  // namespace elstm::num
