#pragma once

#include <cstddef>

#include "elstm/numkernel/matrix.hpp"
#include "elstm/numkernel/tape.hpp"

// Differentiable primitives. Each records one node on the operands' tape.
namespace elstm::num {

Var matmul(Var a, Var b);
/// x * w + bias, with the 1 x m bias broadcast across the rows of x * w.
Var affine(Var x, Var w, Var bias);
Var add_row(Var a, Var row);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);

Var sigmoid(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);

Var elementwise(UnaryOp op, Var a);
Var elementwise(BinaryOp op, Var a, Var b);

Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);

Var sum(Var a);
Var mean(Var a);

Var concat_cols(Var a, Var b);
Var slice_cols(Var a, std::size_t begin, std::size_t count);

/// mean((a - b)^2) over every entry.
Var mse(Var a, Var b);

}  // namespace elstm::num
