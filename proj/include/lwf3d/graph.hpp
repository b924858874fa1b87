#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lwf3d/tensor.hpp"

namespace lwf3d::ad {

// Handle into a Graph's node tape.
struct ValueRef {
    std::uint32_t id = UINT32_MAX;
    bool valid() const { return id != UINT32_MAX; }
};

// Eager tape for reverse-mode differentiation over dense real tensors.
//
// A graph belongs to one training step and one thread. Ops evaluate their
// value immediately; backward() walks the tape in reverse creation order
// (creation order is topological by construction). Node values are never
// mutated after construction. Gradients live in per-node accumulators:
// repeated backward() calls accumulate, reset_grads() clears.
class Graph {
public:
    // Leaf owning a copy of the tensor.
    ValueRef constant(Tensor t);

    // Leaf referencing caller-owned storage (parameters, input clouds).
    // The pointee must outlive the graph and stay unmodified while in use.
    ValueRef external(const Tensor* t);

    // out[i,j] = sum_k x[i,k] w[k,j] + bias[j]
    ValueRef linear(ValueRef x, ValueRef w, ValueRef bias);

    // Elementwise max(0, x); d/dx is 1 for x > 0, 0 otherwise.
    ValueRef relu(ValueRef x);

    // x[n x c] -> [c], column-wise max over rows. Gradient routes to the
    // argmax row per column, lowest row index on ties.
    ValueRef max_reduce_points(ValueRef x);

    // Temperature softmax over a 1-D tensor, max-subtracted for overflow
    // safety. Requires tau > 0.
    ValueRef softmax_tau(ValueRef logits, double tau);

    // out[i,c] = dot(a[i,:], b[c,:]) for a[bxk], b[rxk].
    ValueRef matmul_nt(ValueRef a, ValueRef b);

    ValueRef reshape(ValueRef x, std::vector<std::size_t> shape);

    ValueRef add(ValueRef a, ValueRef b);
    ValueRef scale(ValueRef a, double c);

    // Sum of all entries -> scalar.
    ValueRef sum(ValueRef x);

    // -log softmax(scores)[label] for 1-D scores.
    ValueRef nll_loss(ValueRef scores, std::size_t label);

    // -sum_c softmax(teacher/tau)[c] * log softmax(student/tau)[c].
    // The teacher side is a constant: no gradient flows into it.
    ValueRef kd_loss(ValueRef student_scores, const Tensor& teacher_scores, double tau);

    const Tensor& value(ValueRef v) const;
    double value_scalar(ValueRef v) const;

    // Gradient accumulator; zeros of the value shape before any backward.
    const Tensor& grad(ValueRef v);
    Tensor take_grad(ValueRef v);

    // Accumulates d loss / d node into every reachable node's grad.
    // loss must be scalar.
    void backward(ValueRef loss);

    void reset_grads();
    void clear();
    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        leaf,
        linear,
        relu,
        max_reduce,
        softmax,
        matmul_nt,
        reshape,
        add,
        scale,
        sum,
        nll,
        kd,
    };

    struct Node {
        Op op = Op::leaf;
        std::array<std::uint32_t, 3> parents{};
        std::uint8_t n_parents = 0;
        Tensor owned;
        const Tensor* ext = nullptr;
        Tensor grad;
        double scalar = 0.0;             // tau or scale factor
        std::size_t label = 0;           // nll target
        std::vector<double> aux;         // cached softmax distributions
        std::vector<std::size_t> argmax; // max_reduce routing
    };

    const Tensor& node_value(std::uint32_t id) const {
        const Node& n = nodes_[id];
        return n.ext ? *n.ext : n.owned;
    }

    Node& check(ValueRef v);
    const Node& check(ValueRef v) const;
    ValueRef push(Node n);

    std::vector<Node> nodes_;
};

} // namespace lwf3d::ad
