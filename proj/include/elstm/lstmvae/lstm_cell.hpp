#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "elstm/numkernel/matrix.hpp"
#include "elstm/numkernel/param_set.hpp"
#include "elstm/numkernel/rng.hpp"
#include "elstm/numkernel/tape.hpp"

namespace elstm::vae {

/// Gate weights of one LSTM cell. Gate matrices act on the row-vector
/// concatenation [h_{t-1}, x_t] and are (hidden + input) x hidden; the
/// candidate splits its weights into an input part W_c (input x hidden) and a
/// recurrent part W_hc (hidden x hidden). Biases are 1 x hidden.
struct LstmCellParams {
    num::Matrix W_f, b_f;
    num::Matrix W_i, b_i;
    num::Matrix W_o, b_o;
    num::Matrix W_c, W_hc, b_c;

    static LstmCellParams zeros(std::size_t input, std::size_t hidden);
    num::ParamSet to_param_set(const std::string& prefix = "cell") const;
};

/// One LSTM layer whose parameters live in a shared ParamSet under `prefix`.
class LstmCell {
public:
    LstmCell() = default;
    LstmCell(std::string prefix, std::size_t input, std::size_t hidden);

    std::size_t input() const noexcept { return input_; }
    std::size_t hidden() const noexcept { return hidden_; }
    const std::string& prefix() const noexcept { return prefix_; }

    /// Adds freshly initialised weights: uniform in +-1/sqrt(fan_in), zero
    /// biases except the forget gate at +1.
    void init(num::ParamSet& params, num::Rng& rng) const;

    /// The cell's parameter nodes on one tape, resolved once per sequence.
    struct Bound {
        num::Var W_f, b_f, W_i, b_i, W_o, b_o, W_c, W_hc, b_c;
    };
    Bound bind(num::Tape& tape) const;

    /// F = s(W_f [h, x] + b_f), I and O alike,
    /// C = C_prev * F + I * tanh(W_c x + W_hc h + b_c), h = O * tanh(C).
    std::pair<num::Var, num::Var> step(const Bound& w, num::Var x, num::Var h_prev, num::Var c_prev) const;
    std::pair<num::Var, num::Var> step(num::Tape& tape, num::Var x, num::Var h_prev, num::Var c_prev) const {
        return step(bind(tape), x, h_prev, c_prev);
    }

private:
    std::string name(const char* part) const { return prefix_ + "." + part; }

    std::string prefix_;
    std::size_t input_ = 0;
    std::size_t hidden_ = 0;
};

/// Single step on plain matrices (rows are batch entries).
std::pair<num::Matrix, num::Matrix> lstm_cell_step(const LstmCellParams& params, const num::Matrix& x_t,
                                                   const num::Matrix& h_prev, const num::Matrix& c_prev);

}  // namespace elstm::vae
