#include "elstm/numkernel/ops.hpp"

#include <cmath>
#include <string>

#include "elstm/error.hpp"

namespace elstm::num {

namespace {

void require_same_tape(Var a, Var b) {
    if (&a.tape() != &b.tape()) {
        throw Error("operation mixes variables from different tapes");
    }
}

void require_same_shape(Var a, Var b, const char* what) {
    if (!a.value().same_shape(b.value())) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.value().shape_string() + " vs " +
                             b.value().shape_string());
    }
}

void require_row(Var row, std::size_t cols, const char* what) {
    const Matrix& r = row.value();
    if (r.rows() != 1 || r.cols() != cols) {
        throw DimensionError(std::string(what) + ": bias shape " + r.shape_string() + " does not match " +
                             std::to_string(cols) + " columns");
    }
}

void add_row_inplace(Matrix& m, const Matrix& row) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto dst = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) dst[c] += row[c];
    }
}

void accumulate_column_sums(const Matrix& g, Matrix& out) {
    for (std::size_t r = 0; r < g.rows(); ++r) {
        auto src = g.row(r);
        for (std::size_t c = 0; c < g.cols(); ++c) out[c] += src[c];
    }
}

}  // namespace

Var matmul(Var a, Var b) {
    require_same_tape(a, b);
    Matrix value = matmul(a.value(), b.value());
    return a.tape().record(std::move(value), {a, b}, [a, b](Tape& t, const Matrix& g) {
        if (Matrix* ga = t.grad_target(a)) accumulate_matmul_nt(g, b.value(), *ga);
        if (Matrix* gb = t.grad_target(b)) accumulate_matmul_tn(a.value(), g, *gb);
    });
}

Var affine(Var x, Var w, Var bias) {
    require_same_tape(x, w);
    require_same_tape(x, bias);
    Matrix value = matmul(x.value(), w.value());
    require_row(bias, value.cols(), "affine");
    add_row_inplace(value, bias.value());
    return x.tape().record(std::move(value), {x, w, bias}, [x, w, bias](Tape& t, const Matrix& g) {
        if (Matrix* gx = t.grad_target(x)) accumulate_matmul_nt(g, w.value(), *gx);
        if (Matrix* gw = t.grad_target(w)) accumulate_matmul_tn(x.value(), g, *gw);
        if (Matrix* gb = t.grad_target(bias)) accumulate_column_sums(g, *gb);
    });
}

Var add_row(Var a, Var row) {
    require_same_tape(a, row);
    require_row(row, a.cols(), "add_row");
    Matrix value = a.value();
    add_row_inplace(value, row.value());
    return a.tape().record(std::move(value), {a, row}, [a, row](Tape& t, const Matrix& g) {
        if (Matrix* ga = t.grad_target(a)) *ga += g;
        if (Matrix* gr = t.grad_target(row)) accumulate_column_sums(g, *gr);
    });
}

Var add(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape(a, b, "add");
    Matrix value = elementwise(BinaryOp::add, a.value(), b.value());
    return a.tape().record(std::move(value), {a, b}, [a, b](Tape& t, const Matrix& g) {
        if (Matrix* ga = t.grad_target(a)) *ga += g;
        if (Matrix* gb = t.grad_target(b)) *gb += g;
    });
}

Var sub(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape(a, b, "sub");
    Matrix value = elementwise(BinaryOp::sub, a.value(), b.value());
    return a.tape().record(std::move(value), {a, b}, [a, b](Tape& t, const Matrix& g) {
        if (Matrix* ga = t.grad_target(a)) *ga += g;
        if (Matrix* gb = t.grad_target(b)) *gb -= g;
    });
}

Var hadamard(Var a, Var b) {
    require_same_tape(a, b);
    require_same_shape(a, b, "hadamard");
    Matrix value = elementwise(BinaryOp::hadamard, a.value(), b.value());
    return a.tape().record(std::move(value), {a, b}, [a, b](Tape& t, const Matrix& g) {
        if (Matrix* ga = t.grad_target(a)) {
            const Matrix& bv = b.value();
            for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * bv[i];
        }
        if (Matrix* gb = t.grad_target(b)) {
            const Matrix& av = a.value();
            for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * av[i];
        }
    });
}

Var operator+(Var a, Var b) { return add(a, b); }
Var operator-(Var a, Var b) { return sub(a, b); }

Var sigmoid(Var a) {
    Matrix value = elementwise(UnaryOp::sigmoid, a.value());
    const std::uint32_t out = a.tape().next_id();
    return a.tape().record(std::move(value), {a}, [a, out](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        const Matrix& y = t.value_at(out);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * y[i] * (1.0 - y[i]);
    });
}

Var tanh(Var a) {
    Matrix value = elementwise(UnaryOp::tanh, a.value());
    const std::uint32_t out = a.tape().next_id();
    return a.tape().record(std::move(value), {a}, [a, out](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        const Matrix& y = t.value_at(out);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * (1.0 - y[i] * y[i]);
    });
}

Var exp(Var a) {
    Matrix value = elementwise(UnaryOp::exp, a.value());
    const std::uint32_t out = a.tape().next_id();
    return a.tape().record(std::move(value), {a}, [a, out](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        const Matrix& y = t.value_at(out);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * y[i];
    });
}

Var log(Var a) {
    Matrix value = elementwise(UnaryOp::log, a.value());
    return a.tape().record(std::move(value), {a}, [a](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        const Matrix& x = a.value();
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] / x[i];
    });
}

Var square(Var a) {
    Matrix value = elementwise(UnaryOp::square, a.value());
    return a.tape().record(std::move(value), {a}, [a](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        const Matrix& x = a.value();
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += 2.0 * x[i] * g[i];
    });
}

Var elementwise(UnaryOp op, Var a) {
    switch (op) {
        case UnaryOp::sigmoid: return sigmoid(a);
        case UnaryOp::tanh: return tanh(a);
        case UnaryOp::exp: return exp(a);
        case UnaryOp::log: return log(a);
        case UnaryOp::square: return square(a);
    }
    throw Error("unknown unary op");
}

Var elementwise(BinaryOp op, Var a, Var b) {
    switch (op) {
        case BinaryOp::add: return add(a, b);
        case BinaryOp::sub: return sub(a, b);
        case BinaryOp::hadamard: return hadamard(a, b);
    }
    throw Error("unknown binary op");
}

Var scale(Var a, double factor) {
    Matrix value = scaled(a.value(), factor);
    return a.tape().record(std::move(value), {a}, [a, factor](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += factor * g[i];
    });
}

Var add_scalar(Var a, double offset) {
    Matrix value = a.value();
    for (double& v : value.values()) v += offset;
    return a.tape().record(std::move(value), {a}, [a](Tape& t, const Matrix& g) {
        if (Matrix* ga = t.grad_target(a)) *ga += g;
    });
}

Var sum(Var a) {
    Matrix value(1, 1, sum(a.value()));
    return a.tape().record(std::move(value), {a}, [a](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        for (double& v : ga->values()) v += g[0];
    });
}

Var mean(Var a) {
    const std::size_t n = a.value().size();
    if (n == 0) throw DimensionError("mean of an empty matrix");
    const double inv = 1.0 / static_cast<double>(n);
    Matrix value(1, 1, sum(a.value()) * inv);
    return a.tape().record(std::move(value), {a}, [a, inv](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        const double d = g[0] * inv;
        for (double& v : ga->values()) v += d;
    });
}

Var concat_cols(Var a, Var b) {
    require_same_tape(a, b);
    const Matrix& av = a.value();
    const Matrix& bv = b.value();
    if (av.rows() != bv.rows()) {
        throw DimensionError("concat_cols: row mismatch " + av.shape_string() + " vs " + bv.shape_string());
    }
    const std::size_t ca = av.cols();
    const std::size_t cb = bv.cols();
    Matrix value(av.rows(), ca + cb);
    for (std::size_t r = 0; r < av.rows(); ++r) {
        auto dst = value.row(r);
        auto ra = av.row(r);
        auto rb = bv.row(r);
        for (std::size_t c = 0; c < ca; ++c) dst[c] = ra[c];
        for (std::size_t c = 0; c < cb; ++c) dst[ca + c] = rb[c];
    }
    return a.tape().record(std::move(value), {a, b}, [a, b, ca, cb](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        Matrix* gb = t.grad_target(b);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            auto src = g.row(r);
            if (ga != nullptr) {
                auto dst = ga->row(r);
                for (std::size_t c = 0; c < ca; ++c) dst[c] += src[c];
            }
            if (gb != nullptr) {
                auto dst = gb->row(r);
                for (std::size_t c = 0; c < cb; ++c) dst[c] += src[ca + c];
            }
        }
    });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
    const Matrix& av = a.value();
    if (begin + count > av.cols()) {
        throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                             ") out of range for " + av.shape_string());
    }
    Matrix value(av.rows(), count);
    for (std::size_t r = 0; r < av.rows(); ++r) {
        auto src = av.row(r);
        auto dst = value.row(r);
        for (std::size_t c = 0; c < count; ++c) dst[c] = src[begin + c];
    }
    return a.tape().record(std::move(value), {a}, [a, begin, count](Tape& t, const Matrix& g) {
        Matrix* ga = t.grad_target(a);
        if (ga == nullptr) return;
        for (std::size_t r = 0; r < g.rows(); ++r) {
            auto src = g.row(r);
            auto dst = ga->row(r);
            for (std::size_t c = 0; c < count; ++c) dst[begin + c] += src[c];
        }
    });
}

Var mse(Var a, Var b) { return mean(square(sub(a, b))); }

}  // namespace elstm::num
