#pragma once

#include <span>

#include "elstm/numkernel/matrix.hpp"

namespace elstm::num {

/// Lower-triangular L with a = L * L^T. Throws NumericError when `a` is not
/// symmetric positive definite.
Matrix cholesky(const Matrix& a);

/// log|a| from its Cholesky factor.
double log_det_from_cholesky(const Matrix& lower);

/// Solves L * y = b for y by forward substitution.
void solve_lower_inplace(const Matrix& lower, std::span<double> b);

}  // namespace elstm::num
