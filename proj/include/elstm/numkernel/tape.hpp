#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "elstm/numkernel/matrix.hpp"
#include "elstm/numkernel/param_set.hpp"

namespace elstm::num {

class Tape;

/// Handle to a matrix recorded on a Tape.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    Tape& tape() const noexcept { return *tape_; }
    std::uint32_t id() const noexcept { return id_; }
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    bool valid() const noexcept { return tape_ != nullptr; }

private:
    friend class Tape;
    Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::uint32_t id_ = 0;
};

/// Operation tape for reverse-mode differentiation.
///
/// Every primitive appends a node holding its value and an adjoint closure.
/// backward() replays the closures in exact reverse order of recording and
/// consumes the tape; recording onto or differentiating a consumed tape throws.
/// Nodes that do not depend on any tracked leaf carry no gradient and are
/// skipped during the reverse sweep.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, const Matrix& grad)>;

    Tape() = default;
    /// Parameters of `params` become available through param(); the set must
    /// outlive the tape. With `track_params` false they are recorded as
    /// constants, which skips adjoint bookkeeping for pure inference.
    explicit Tape(const ParamSet& params, bool track_params = true);

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Matrix value);
    /// Tracked leaf that is not part of the bound ParamSet; its gradient is
    /// readable through grad() after backward().
    Var variable(Matrix value);
    /// Tracked leaf for the named parameter. Repeated calls return the same node.
    Var param(std::string_view name);

    /// Gradients of the 1x1 `loss` for every parameter of the bound set, in
    /// the set's order. Parameters the loss does not depend on get zeros.
    ParamSet backward(Var loss);

    bool consumed() const noexcept { return consumed_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const ParamSet* params() const noexcept { return params_; }

    const Matrix& value(Var v) const { return nodes_[v.id()].value; }
    const Matrix& value_at(std::uint32_t id) const { return nodes_[id].value; }
    /// Id the next recorded node will receive; lets an adjoint read its own output.
    std::uint32_t next_id() const noexcept { return static_cast<std::uint32_t>(nodes_.size()); }
    /// Gradient accumulated for `v` by the last backward(); zeros if none reached it.
    Matrix grad(Var v) const;
    bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }

    // Extension surface used by the primitive operations.
    Var record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward);
    /// Gradient buffer of `v` for accumulation, or nullptr if `v` is untracked.
    Matrix* grad_target(Var v);

private:
    struct Node {
        Matrix value;
        Matrix grad;
        BackwardFn backward;
        bool requires_grad = false;
    };

    Var push(Node node);
    void ensure_recordable() const;

    const ParamSet* params_ = nullptr;
    bool track_params_ = true;
    std::vector<std::int64_t> param_nodes_;
    std::vector<Node> nodes_;
    bool consumed_ = false;
};

}  // namespace elstm::num
