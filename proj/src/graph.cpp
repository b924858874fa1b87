#include "lwf3d/graph.hpp"

#include <cmath>

#include "lwf3d/kernels.hpp"

namespace lwf3d::ad {

Graph::Node& Graph::check(ValueRef v) {
    if (!v.valid() || v.id >= nodes_.size()) throw contract_error("invalid graph value reference");
    return nodes_[v.id];
}

const Graph::Node& Graph::check(ValueRef v) const {
    if (!v.valid() || v.id >= nodes_.size()) throw contract_error("invalid graph value reference");
    return nodes_[v.id];
}

ValueRef Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return ValueRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

ValueRef Graph::constant(Tensor t) {
    Node n;
    n.owned = std::move(t);
    return push(std::move(n));
}

ValueRef Graph::external(const Tensor* t) {
    if (!t) throw contract_error("external leaf must not be null");
    Node n;
    n.ext = t;
    return push(std::move(n));
}

ValueRef Graph::linear(ValueRef x, ValueRef w, ValueRef bias) {
    check(x);
    check(w);
    check(bias);
    Node n;
    n.op = Op::linear;
    n.parents = {x.id, w.id, bias.id};
    n.n_parents = 3;
    kernels::matmul_bias(node_value(x.id), node_value(w.id), &node_value(bias.id), n.owned);
    return push(std::move(n));
}

ValueRef Graph::relu(ValueRef x) {
    check(x);
    Node n;
    n.op = Op::relu;
    n.parents = {x.id};
    n.n_parents = 1;
    kernels::relu(node_value(x.id), n.owned);
    return push(std::move(n));
}

ValueRef Graph::max_reduce_points(ValueRef x) {
    check(x);
    Node n;
    n.op = Op::max_reduce;
    n.parents = {x.id};
    n.n_parents = 1;
    kernels::colwise_max(node_value(x.id), n.owned, n.argmax);
    return push(std::move(n));
}

ValueRef Graph::softmax_tau(ValueRef logits, double tau) {
    if (!(tau > 0.0)) throw contract_error("softmax_tau: tau must be positive, got " + std::to_string(tau));
    check(logits);
    const Tensor& in = node_value(logits.id);
    if (in.rank() != 1) throw shape_error("softmax_tau expects a 1-D tensor, got " + Tensor::shape_string(in.shape));
    Node n;
    n.op = Op::softmax;
    n.parents = {logits.id};
    n.n_parents = 1;
    n.scalar = tau;
    n.owned.shape = in.shape;
    n.owned.values.resize(in.numel());
    kernels::softmax_scaled(in.values.data(), n.owned.values.data(), in.numel(), tau);
    return push(std::move(n));
}

ValueRef Graph::matmul_nt(ValueRef a, ValueRef b) {
    check(a);
    check(b);
    Node n;
    n.op = Op::matmul_nt;
    n.parents = {a.id, b.id};
    n.n_parents = 2;
    kernels::matmul_nt(node_value(a.id), node_value(b.id), n.owned);
    return push(std::move(n));
}

ValueRef Graph::reshape(ValueRef x, std::vector<std::size_t> shape) {
    check(x);
    const Tensor& in = node_value(x.id);
    if (Tensor::checked_numel(shape) != in.numel()) {
        throw shape_error("reshape: cannot view " + Tensor::shape_string(in.shape) + " as " +
                          Tensor::shape_string(shape));
    }
    Node n;
    n.op = Op::reshape;
    n.parents = {x.id};
    n.n_parents = 1;
    n.owned = Tensor(std::move(shape), in.values);
    return push(std::move(n));
}

ValueRef Graph::add(ValueRef a, ValueRef b) {
    check(a);
    check(b);
    const Tensor& av = node_value(a.id);
    const Tensor& bv = node_value(b.id);
    require_same_shape(av, bv, "add");
    Node n;
    n.op = Op::add;
    n.parents = {a.id, b.id};
    n.n_parents = 2;
    n.owned = av;
    for (std::size_t i = 0; i < bv.numel(); ++i) n.owned.values[i] += bv.values[i];
    return push(std::move(n));
}

ValueRef Graph::scale(ValueRef a, double c) {
    check(a);
    const Tensor& av = node_value(a.id);
    Node n;
    n.op = Op::scale;
    n.parents = {a.id};
    n.n_parents = 1;
    n.scalar = c;
    n.owned = av;
    for (double& v : n.owned.values) v *= c;
    return push(std::move(n));
}

ValueRef Graph::sum(ValueRef x) {
    check(x);
    const Tensor& xv = node_value(x.id);
    double acc = 0.0;
    for (const double v : xv.values) acc += v;
    Node n;
    n.op = Op::sum;
    n.parents = {x.id};
    n.n_parents = 1;
    n.owned = Tensor::scalar(acc);
    return push(std::move(n));
}

ValueRef Graph::nll_loss(ValueRef scores, std::size_t label) {
    check(scores);
    const Tensor& s = node_value(scores.id);
    if (s.rank() != 1) throw shape_error("nll_loss expects 1-D scores, got " + Tensor::shape_string(s.shape));
    if (label >= s.numel()) {
        throw contract_error("nll_loss: label " + std::to_string(label) + " out of range for " +
                             std::to_string(s.numel()) + " classes");
    }
    Node n;
    n.op = Op::nll;
    n.parents = {scores.id};
    n.n_parents = 1;
    n.label = label;
    n.aux.resize(s.numel());
    kernels::softmax_scaled(s.values.data(), n.aux.data(), s.numel(), 1.0);
    const double lse = kernels::logsumexp_scaled(s.values.data(), s.numel(), 1.0);
    n.owned = Tensor::scalar(lse - s.values[label]);
    return push(std::move(n));
}

ValueRef Graph::kd_loss(ValueRef student_scores, const Tensor& teacher_scores, double tau) {
    if (!(tau > 0.0)) throw contract_error("kd_loss: tau must be positive, got " + std::to_string(tau));
    check(student_scores);
    const Tensor& s = node_value(student_scores.id);
    if (s.rank() != 1 || teacher_scores.rank() != 1 || s.numel() != teacher_scores.numel()) {
        throw shape_error("kd_loss: student " + Tensor::shape_string(s.shape) + " vs teacher " +
                          Tensor::shape_string(teacher_scores.shape));
    }
    const std::size_t c = s.numel();
    Node n;
    n.op = Op::kd;
    n.parents = {student_scores.id};
    n.n_parents = 1;
    n.scalar = tau;
    n.aux.resize(2 * c); // [0,c) teacher distribution p, [c,2c) student distribution q
    kernels::softmax_scaled(teacher_scores.values.data(), n.aux.data(), c, tau);
    kernels::softmax_scaled(s.values.data(), n.aux.data() + c, c, tau);
    const double lse = kernels::logsumexp_scaled(s.values.data(), c, tau);
    double loss = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        const double logq = s.values[i] / tau - lse;
        loss -= n.aux[i] * logq;
    }
    n.owned = Tensor::scalar(loss);
    return push(std::move(n));
}

const Tensor& Graph::value(ValueRef v) const {
    check(v);
    return node_value(v.id);
}

double Graph::value_scalar(ValueRef v) const {
    const Tensor& t = value(v);
    if (t.numel() != 1) throw contract_error("expected scalar, got " + Tensor::shape_string(t.shape));
    return t.values[0];
}

const Tensor& Graph::grad(ValueRef v) {
    Node& n = check(v);
    if (n.grad.numel() == 0) n.grad = Tensor(node_value(v.id).shape);
    return n.grad;
}

Tensor Graph::take_grad(ValueRef v) {
    Node& n = check(v);
    if (n.grad.numel() == 0) n.grad = Tensor(node_value(v.id).shape);
    Tensor out = std::move(n.grad);
    n.grad = Tensor();
    return out;
}

void Graph::reset_grads() {
    for (Node& n : nodes_) n.grad = Tensor();
}

void Graph::clear() { nodes_.clear(); }

void Graph::backward(ValueRef loss) {
    const Node& ln = check(loss);
    if (node_value(loss.id).numel() != 1) {
        throw contract_error("backward requires a scalar loss, got " +
                             Tensor::shape_string(node_value(loss.id).shape));
    }
    (void)ln;

    // Per-call adjoints; accumulated into persistent node grads at the end
    // so repeated backward calls add up.
    std::vector<Tensor> adj(nodes_.size());
    adj[loss.id] = Tensor::scalar(1.0);

    auto ensure = [&](std::uint32_t id) -> Tensor& {
        if (adj[id].numel() == 0) adj[id] = Tensor(node_value(id).shape);
        return adj[id];
    };

    for (std::uint32_t id = loss.id + 1; id-- > 0;) {
        if (adj[id].numel() == 0) continue; // not reachable from the loss
        Node& n = nodes_[id];
        const Tensor& up = adj[id];
        switch (n.op) {
        case Op::leaf:
            break;
        case Op::linear: {
            const Tensor& x = node_value(n.parents[0]);
            const Tensor& w = node_value(n.parents[1]);
            const std::size_t b = x.rows(), p = x.cols(), q = w.cols();
            Tensor& dx = ensure(n.parents[0]);
            Tensor& dw = ensure(n.parents[1]);
            Tensor& db = ensure(n.parents[2]);
            for (std::size_t i = 0; i < b; ++i) {
                const double* urow = up.values.data() + i * q;
                double* dxrow = dx.values.data() + i * p;
                for (std::size_t k = 0; k < p; ++k) {
                    const double* wrow = w.values.data() + k * q;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < q; ++j) acc += urow[j] * wrow[j];
                    dxrow[k] += acc;
                }
                const double* xrow = x.values.data() + i * p;
                for (std::size_t k = 0; k < p; ++k) {
                    const double xv = xrow[k];
                    double* dwrow = dw.values.data() + k * q;
                    for (std::size_t j = 0; j < q; ++j) dwrow[j] += xv * urow[j];
                }
                for (std::size_t j = 0; j < q; ++j) db.values[j] += urow[j];
            }
            break;
        }
        case Op::relu: {
            const Tensor& x = node_value(n.parents[0]);
            Tensor& dx = ensure(n.parents[0]);
            for (std::size_t i = 0; i < x.numel(); ++i) {
                if (x.values[i] > 0.0) dx.values[i] += up.values[i];
            }
            break;
        }
        case Op::max_reduce: {
            const Tensor& x = node_value(n.parents[0]);
            Tensor& dx = ensure(n.parents[0]);
            const std::size_t c = x.cols();
            for (std::size_t j = 0; j < c; ++j) dx.values[n.argmax[j] * c + j] += up.values[j];
            break;
        }
        case Op::softmax: {
            const Tensor& y = n.owned;
            Tensor& dx = ensure(n.parents[0]);
            double dot = 0.0;
            for (std::size_t i = 0; i < y.numel(); ++i) dot += up.values[i] * y.values[i];
            const double inv_tau = 1.0 / n.scalar;
            for (std::size_t i = 0; i < y.numel(); ++i) {
                dx.values[i] += inv_tau * y.values[i] * (up.values[i] - dot);
            }
            break;
        }
        case Op::matmul_nt: {
            const Tensor& a = node_value(n.parents[0]);
            const Tensor& bt = node_value(n.parents[1]);
            const std::size_t b = a.rows(), k = a.cols(), r = bt.rows();
            Tensor& da = ensure(n.parents[0]);
            Tensor& dbt = ensure(n.parents[1]);
            for (std::size_t i = 0; i < b; ++i) {
                const double* urow = up.values.data() + i * r;
                double* darow = da.values.data() + i * k;
                const double* arow = a.values.data() + i * k;
                for (std::size_t c2 = 0; c2 < r; ++c2) {
                    const double u = urow[c2];
                    if (u == 0.0) continue;
                    const double* brow = bt.values.data() + c2 * k;
                    double* dbrow = dbt.values.data() + c2 * k;
                    for (std::size_t j = 0; j < k; ++j) {
                        darow[j] += u * brow[j];
                        dbrow[j] += u * arow[j];
                    }
                }
            }
            break;
        }
        case Op::reshape: {
            Tensor& dx = ensure(n.parents[0]);
            for (std::size_t i = 0; i < up.numel(); ++i) dx.values[i] += up.values[i];
            break;
        }
        case Op::add: {
            Tensor& da = ensure(n.parents[0]);
            Tensor& db = ensure(n.parents[1]);
            for (std::size_t i = 0; i < up.numel(); ++i) {
                da.values[i] += up.values[i];
                db.values[i] += up.values[i];
            }
            break;
        }
        case Op::scale: {
            Tensor& da = ensure(n.parents[0]);
            for (std::size_t i = 0; i < up.numel(); ++i) da.values[i] += n.scalar * up.values[i];
            break;
        }
        case Op::sum: {
            Tensor& dx = ensure(n.parents[0]);
            const double u = up.values[0];
            for (double& v : dx.values) v += u;
            break;
        }
        case Op::nll: {
            Tensor& ds = ensure(n.parents[0]);
            const double u = up.values[0];
            for (std::size_t i = 0; i < n.aux.size(); ++i) {
                double g = n.aux[i];
                if (i == n.label) g -= 1.0;
                ds.values[i] += u * g;
            }
            break;
        }
        case Op::kd: {
            Tensor& ds = ensure(n.parents[0]);
            const double u = up.values[0];
            const std::size_t c = n.aux.size() / 2;
            const double inv_tau = 1.0 / n.scalar;
            for (std::size_t i = 0; i < c; ++i) {
                ds.values[i] += u * (n.aux[c + i] - n.aux[i]) * inv_tau;
            }
            break;
        }
        }
    }

    for (std::uint32_t id = 0; id <= loss.id; ++id) {
        if (adj[id].numel() == 0) continue;
        Node& n = nodes_[id];
        if (n.grad.numel() == 0) {
            n.grad = std::move(adj[id]);
        } else {
            for (std::size_t i = 0; i < n.grad.numel(); ++i) n.grad.values[i] += adj[id].values[i];
        }
    }
}

} // namespace lwf3d::ad
