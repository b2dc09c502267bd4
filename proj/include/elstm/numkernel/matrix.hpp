#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace elstm::num {

/// Dense row-major matrix of doubles. The numeric carrier for every model in
/// the pipeline; value-semantic and cheap to move.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix row_vector(std::span<const double> values);
    static Matrix column_vector(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_string() const;

    void fill(double value);
    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scalar);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class UnaryOp { sigmoid, tanh, exp, log, square };
enum class BinaryOp { add, sub, hadamard };

double sigmoid(double x) noexcept;

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// out += a * b^T and out += a^T * b; the adjoint kernels of matmul.
void accumulate_matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
void accumulate_matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);

Matrix elementwise(UnaryOp op, const Matrix& a);
Matrix elementwise(BinaryOp op, const Matrix& a, const Matrix& b);

Matrix scaled(const Matrix& a, double scalar);
double sum(const Matrix& a);
bool all_finite(const Matrix& a) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace elstm::num
