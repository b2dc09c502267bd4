#include "elstm/lstmvae/lstm_cell.hpp"

#include <cmath>

#include "elstm/error.hpp"
#include "elstm/numkernel/ops.hpp"

namespace elstm::vae {

using num::Matrix;
using num::Var;

LstmCellParams LstmCellParams::zeros(std::size_t input, std::size_t hidden) {
    const std::size_t joint = input + hidden;
    return {Matrix(joint, hidden), Matrix(1, hidden), Matrix(joint, hidden), Matrix(1, hidden),
            Matrix(joint, hidden), Matrix(1, hidden), Matrix(input, hidden), Matrix(hidden, hidden),
            Matrix(1, hidden)};
}

num::ParamSet LstmCellParams::to_param_set(const std::string& prefix) const {
    num::ParamSet set;
    set.add(prefix + ".W_f", W_f);
    set.add(prefix + ".b_f", b_f);
    set.add(prefix + ".W_i", W_i);
    set.add(prefix + ".b_i", b_i);
    set.add(prefix + ".W_o", W_o);
    set.add(prefix + ".b_o", b_o);
    set.add(prefix + ".W_c", W_c);
    set.add(prefix + ".W_hc", W_hc);
    set.add(prefix + ".b_c", b_c);
    return set;
}

LstmCell::LstmCell(std::string prefix, std::size_t input, std::size_t hidden)
    : prefix_(std::move(prefix)), input_(input), hidden_(hidden) {
    if (input == 0 || hidden == 0) throw ConfigError("LstmCell: input and hidden sizes must be >= 1");
}

void LstmCell::init(num::ParamSet& params, num::Rng& rng) const {
    auto uniform = [&](std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
        for (double& v : m.values()) v = rng.uniform(-bound, bound);
        return m;
    };
    const std::size_t joint = input_ + hidden_;
    params.add(name("W_f"), uniform(joint, hidden_));
    params.add(name("b_f"), Matrix(1, hidden_, 1.0));
    params.add(name("W_i"), uniform(joint, hidden_));
    params.add(name("b_i"), Matrix(1, hidden_));
    params.add(name("W_o"), uniform(joint, hidden_));
    params.add(name("b_o"), Matrix(1, hidden_));
    params.add(name("W_c"), uniform(input_, hidden_));
    params.add(name("W_hc"), uniform(hidden_, hidden_));
    params.add(name("b_c"), Matrix(1, hidden_));
}

LstmCell::Bound LstmCell::bind(num::Tape& tape) const {
    return {tape.param(name("W_f")), tape.param(name("b_f")), tape.param(name("W_i")),
            tape.param(name("b_i")), tape.param(name("W_o")), tape.param(name("b_o")),
            tape.param(name("W_c")), tape.param(name("W_hc")), tape.param(name("b_c"))};
}

std::pair<Var, Var> LstmCell::step(const Bound& w, Var x, Var h_prev, Var c_prev) const {
    if (x.cols() != input_ || h_prev.cols() != hidden_ || c_prev.cols() != hidden_ ||
        h_prev.rows() != x.rows() || c_prev.rows() != x.rows()) {
        throw DimensionError("LstmCell " + prefix_ + ": x " + x.value().shape_string() + ", h " +
                             h_prev.value().shape_string() + ", c " + c_prev.value().shape_string() +
                             " do not fit input " + std::to_string(input_) + " / hidden " +
                             std::to_string(hidden_));
    }
    Var joint = num::concat_cols(h_prev, x);
    Var forget = num::sigmoid(num::affine(joint, w.W_f, w.b_f));
    Var in = num::sigmoid(num::affine(joint, w.W_i, w.b_i));
    Var out = num::sigmoid(num::affine(joint, w.W_o, w.b_o));
    Var candidate = num::tanh(num::add(num::affine(x, w.W_c, w.b_c), num::matmul(h_prev, w.W_hc)));
    Var c = num::add(num::hadamard(c_prev, forget), num::hadamard(in, candidate));
    Var h = num::hadamard(out, num::tanh(c));
    return {h, c};
}

std::pair<Matrix, Matrix> lstm_cell_step(const LstmCellParams& params, const Matrix& x_t, const Matrix& h_prev,
                                         const Matrix& c_prev) {
    const num::ParamSet set = params.to_param_set("cell");
    const LstmCell cell("cell", params.W_c.rows(), params.W_c.cols());
    num::Tape tape(set);
    auto [h, c] = cell.step(tape, tape.constant(x_t), tape.constant(h_prev), tape.constant(c_prev));
    return {h.value(), c.value()};
}

}  // namespace elstm::vae
