#include "elstm/numkernel/tape.hpp"

#include <string>

#include "elstm/error.hpp"

namespace elstm::num {

const Matrix& Var::value() const { return tape_->value(*this); }

Tape::Tape(const ParamSet& params, bool track_params)
    : params_(&params), track_params_(track_params), param_nodes_(params.size(), -1) {}

void Tape::ensure_recordable() const {
    if (consumed_) {
        throw Error("tape already consumed by a backward pass");
    }
}

Var Tape::push(Node node) {
    ensure_recordable();
    nodes_.push_back(std::move(node));
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) { return push(Node{std::move(value), {}, {}, false}); }

Var Tape::variable(Matrix value) { return push(Node{std::move(value), {}, {}, true}); }

Var Tape::param(std::string_view name) {
    if (params_ == nullptr) {
        throw ConfigError("tape has no bound parameter set (requested '" + std::string(name) + "')");
    }
    const std::size_t index = params_->index_of(name);
    if (param_nodes_[index] < 0) {
        Var v = push(Node{params_->entry(index).value, {}, {}, track_params_});
        param_nodes_[index] = v.id();
        return v;
    }
    return Var(this, static_cast<std::uint32_t>(param_nodes_[index]));
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward) {
    bool tracked = false;
    for (const Var& p : parents) {
        if (&p.tape() != this) {
            throw Error("operation mixes variables from different tapes");
        }
        tracked = tracked || nodes_[p.id()].requires_grad;
    }
    if (!tracked) backward = nullptr;
    return push(Node{std::move(value), {}, std::move(backward), tracked});
}

Matrix* Tape::grad_target(Var v) {
    Node& node = nodes_[v.id()];
    if (!node.requires_grad) return nullptr;
    if (node.grad.empty() && !node.value.empty()) {
        node.grad = Matrix(node.value.rows(), node.value.cols());
    }
    return &node.grad;
}

Matrix Tape::grad(Var v) const {
    const Node& node = nodes_[v.id()];
    if (node.grad.empty()) return Matrix(node.value.rows(), node.value.cols());
    return node.grad;
}

ParamSet Tape::backward(Var loss) {
    if (consumed_) {
        throw Error("tape already consumed by a backward pass");
    }
    if (&loss.tape() != this) {
        throw Error("backward: loss was recorded on a different tape");
    }
    const Matrix& lv = nodes_[loss.id()].value;
    if (lv.rows() != 1 || lv.cols() != 1) {
        throw DimensionError("backward: loss must be 1x1, got " + lv.shape_string());
    }
    consumed_ = true;

    if (Matrix* seed = grad_target(loss)) {
        (*seed)[0] = 1.0;
    }
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
        Node& node = nodes_[i];
        if (!node.requires_grad || !node.backward || node.grad.empty()) continue;
        node.backward(*this, node.grad);
    }

    ParamSet grads;
    if (params_ != nullptr) {
        for (std::size_t i = 0; i < params_->size(); ++i) {
            const auto& entry = params_->entry(i);
            const std::int64_t node = param_nodes_[i];
            if (node >= 0 && !nodes_[node].grad.empty()) {
                grads.add(entry.name, nodes_[node].grad);
            } else {
                grads.add(entry.name, Matrix(entry.value.rows(), entry.value.cols()));
            }
        }
    }
    return grads;
}

}  // namespace elstm::num
