#pragma once

#include <functional>
#include <vector>

#include "airgnn/matrix.hpp"

namespace airgnn::diffmath {

/// Reverse-mode automatic differentiation over dense real matrices.
///
/// Every operation appends a node holding the forward value and, when
/// recording, a closure that scatters the node's adjoint back to its inputs.
/// backward() walks the nodes in reverse creation order, so any DAG built
/// from the supported ops (matmul, add, elementwise mul/div, relu, sigmoid,
/// log, sum, mean, concat, slice/gather, scalar broadcast) differentiates
/// correctly, including unrolled recurrences.
class Tape {
public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    explicit Tape(bool record = true) : record_(record) {}

    /// Leaf that participates in gradients (a trainable parameter).
    Var input(Matrix v);
    /// Leaf treated as data: no gradient is accumulated for it.
    Var constant(Matrix v);

    const Matrix& value(Var v) const { return node(v).value; }
    /// Gradient of the last backward() loss w.r.t. v. Zero matrix if v never
    /// influenced the loss.
    Matrix grad(Var v) const;

    /// Back-propagates from a 1x1 loss node and then clears the recorded
    /// closures; a second call is a usage error.
    void backward(Var loss);

    // -- operations ---------------------------------------------------------
    Var matmul(Var a, Var b);
    Var add(Var a, Var b);   // same shape, or b a 1xC row (bias) or 1x1 scalar
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);   // elementwise; either side may be 1x1
    Var div(Var a, Var b);   // elementwise; b may be 1x1
    Var relu(Var a);
    Var sigmoid(Var a);
    Var log(Var a);          // natural log; log2 = scale(log(x), 1/ln 2)
    Var sum(Var a);          // -> 1x1
    Var mean(Var a);         // -> 1x1
    Var scale(Var a, double c);
    Var add_scalar(Var a, double c);
    Var concat_cols(const std::vector<Var>& parts);
    Var concat_rows(const std::vector<Var>& parts);
    Var slice_cols(Var a, int c0, int c1);          // columns [c0, c1)
    Var gather_rows(Var a, std::vector<int> idx);   // rows a[idx[k]]

    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        std::function<void()> backprop;
    };

    std::vector<Node> nodes_;
    bool record_;
    bool backward_done_ = false;

    Node& node(Var v) { return nodes_.at(static_cast<size_t>(v.id)); }
    const Node& node(Var v) const { return nodes_.at(static_cast<size_t>(v.id)); }
    Var push(Matrix v, bool requires_grad, std::function<void()> backprop);
    void accumulate(int id, const Matrix& g);
    static void check_finite(const Matrix& m, const char* op);

    friend class TapeTestAccess;
};

}  // namespace airgnn::diffmath
