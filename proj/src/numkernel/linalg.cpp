#include "elstm/numkernel/linalg.hpp"

#include <cmath>
#include <string>

#include "elstm/error.hpp"

namespace elstm::num {

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("cholesky: matrix must be square, got " + a.shape_string());
    }
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw NumericError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) +
                               " = " + std::to_string(diag) + ")");
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return l;
}

double log_det_from_cholesky(const Matrix& lower) {
    double acc = 0.0;
    for (std::size_t i = 0; i < lower.rows(); ++i) acc += std::log(lower(i, i));
    return 2.0 * acc;
}

void solve_lower_inplace(const Matrix& lower, std::span<double> b) {
    const std::size_t n = lower.rows();
    if (b.size() != n) throw DimensionError("solve_lower: right-hand side length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= lower(i, k) * b[k];
        b[i] = v / lower(i, i);
    }
}

}  // namespace elstm::num
