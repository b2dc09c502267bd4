#include "elstm/numkernel/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elstm/error.hpp"

namespace elstm::num {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("Matrix: " + std::to_string(data_.size()) + " values for shape " +
                             shape_string());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
    return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::column_vector(std::span<const double> values) {
    return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double scalar) {
    for (double& v : data_) v *= scalar;
    return *this;
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: shape mismatch " + a.shape_string() + " x " + b.shape_string());
    }
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    const std::size_t m = b.cols();
    Matrix out(n, m);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* po = out.values().data();
    for (std::size_t i = 0; i < n; ++i) {
        double* __restrict orow = po + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = pa[i * k + p];
            const double* __restrict brow = pb + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

void accumulate_matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    // out(n x m) += a(n x k) * b(m x k)^T
    if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows()) {
        throw DimensionError("matmul_nt: shape mismatch " + a.shape_string() + " " + b.shape_string() +
                             " -> " + out.shape_string());
    }
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    const std::size_t m = b.rows();
    // Transposing b first keeps the inner loop contiguous in the output row.
    const Matrix bt = transpose(b);
    const double* pa = a.values().data();
    const double* pb = bt.values().data();
    double* po = out.values().data();
    for (std::size_t i = 0; i < n; ++i) {
        double* __restrict orow = po + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = pa[i * k + p];
            const double* __restrict brow = pb + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

void accumulate_matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    // out(k x m) += a(n x k)^T * b(n x m)
    if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols()) {
        throw DimensionError("matmul_tn: shape mismatch " + a.shape_string() + " " + b.shape_string() +
                             " -> " + out.shape_string());
    }
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    const std::size_t m = b.cols();
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* po = out.values().data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = pa + i * k;
        const double* brow = pb + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            double* __restrict orow = po + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    }
    return out;
}

Matrix elementwise(UnaryOp op, const Matrix& a) {
    Matrix out(a.rows(), a.cols());
    auto in = a.values();
    auto dst = out.values();
    switch (op) {
        case UnaryOp::sigmoid:
            for (std::size_t i = 0; i < in.size(); ++i) dst[i] = sigmoid(in[i]);
            break;
        case UnaryOp::tanh:
            for (std::size_t i = 0; i < in.size(); ++i) dst[i] = std::tanh(in[i]);
            break;
        case UnaryOp::exp:
            for (std::size_t i = 0; i < in.size(); ++i) dst[i] = std::exp(in[i]);
            break;
        case UnaryOp::log:
            for (std::size_t i = 0; i < in.size(); ++i) {
                if (!(in[i] > 0.0)) {
                    throw DomainError("log: non-positive entry " + std::to_string(in[i]) + " at index " +
                                      std::to_string(i));
                }
                dst[i] = std::log(in[i]);
            }
            break;
        case UnaryOp::square:
            for (std::size_t i = 0; i < in.size(); ++i) dst[i] = in[i] * in[i];
            break;
    }
    return out;
}

Matrix elementwise(BinaryOp op, const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "elementwise");
    Matrix out(a.rows(), a.cols());
    auto x = a.values();
    auto y = b.values();
    auto dst = out.values();
    switch (op) {
        case BinaryOp::add:
            for (std::size_t i = 0; i < x.size(); ++i) dst[i] = x[i] + y[i];
            break;
        case BinaryOp::sub:
            for (std::size_t i = 0; i < x.size(); ++i) dst[i] = x[i] - y[i];
            break;
        case BinaryOp::hadamard:
            for (std::size_t i = 0; i < x.size(); ++i) dst[i] = x[i] * y[i];
            break;
    }
    return out;
}

Matrix scaled(const Matrix& a, double scalar) {
    Matrix out = a;
    out *= scalar;
    return out;
}

double sum(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.values()) acc += v;
    return acc;
}

bool all_finite(const Matrix& a) noexcept {
    return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace elstm::num
