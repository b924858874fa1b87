#include "lwf3d/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lwf3d::kernels {

void matmul_bias(const Tensor& x, const Tensor& w, const Tensor* bias, Tensor& out) {
    if (x.rank() != 2 || w.rank() != 2 || x.cols() != w.rows()) {
        throw shape_error("linear: inner dimensions disagree, x " + Tensor::shape_string(x.shape) +
                          " vs w " + Tensor::shape_string(w.shape));
    }
    const std::size_t b = x.rows(), p = x.cols(), q = w.cols();
    if (bias && (bias->rank() != 1 || bias->numel() != q)) {
        throw shape_error("linear: bias " + Tensor::shape_string(bias->shape) + " does not match w " +
                          Tensor::shape_string(w.shape));
    }
    out.shape = {b, q};
    out.values.resize(b * q);
    const double* xp = x.values.data();
    const double* wp = w.values.data();
    double* op = out.values.data();
    for (std::size_t i = 0; i < b; ++i) {
        double* orow = op + i * q;
        if (bias) {
            const double* bp = bias->values.data();
            for (std::size_t j = 0; j < q; ++j) orow[j] = bp[j];
        } else {
            std::fill(orow, orow + q, 0.0);
        }
        const double* xrow = xp + i * p;
        for (std::size_t k = 0; k < p; ++k) {
            const double xv = xrow[k];
            const double* wrow = wp + k * q;
            for (std::size_t j = 0; j < q; ++j) orow[j] += xv * wrow[j];
        }
    }
}

void matmul_nt(const Tensor& a, const Tensor& bt, Tensor& out) {
    if (a.rank() != 2 || bt.rank() != 2 || a.cols() != bt.cols()) {
        throw shape_error("matmul_nt: inner dimensions disagree, a " + Tensor::shape_string(a.shape) +
                          " vs b " + Tensor::shape_string(bt.shape));
    }
    const std::size_t b = a.rows(), k = a.cols(), r = bt.rows();
    out.shape = {b, r};
    out.values.resize(b * r);
    for (std::size_t i = 0; i < b; ++i) {
        const double* arow = a.values.data() + i * k;
        for (std::size_t c = 0; c < r; ++c) {
            const double* brow = bt.values.data() + c * k;
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += arow[j] * brow[j];
            out.values[i * r + c] = acc;
        }
    }
}

void relu(const Tensor& x, Tensor& out) {
    out.shape = x.shape;
    out.values.resize(x.numel());
    for (std::size_t i = 0; i < x.numel(); ++i) out.values[i] = x.values[i] > 0.0 ? x.values[i] : 0.0;
}

void colwise_max(const Tensor& x, Tensor& out, std::vector<std::size_t>& argmax) {
    if (x.rank() != 2) {
        throw shape_error("max_reduce_points expects a 2-D tensor, got " + Tensor::shape_string(x.shape));
    }
    const std::size_t n = x.rows(), c = x.cols();
    out.shape = {c};
    out.values.assign(x.values.begin(), x.values.begin() + c);
    argmax.assign(c, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const double* row = x.values.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) {
            if (row[j] > out.values[j]) {
                out.values[j] = row[j];
                argmax[j] = i;
            }
        }
    }
}

void softmax_scaled(const double* in, double* out, std::size_t n, double tau) {
    double m = in[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, in[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp((in[i] - m) / tau);
        z += out[i];
    }
    const double inv = 1.0 / z;
    for (std::size_t i = 0; i < n; ++i) out[i] *= inv;
}

double logsumexp_scaled(const double* in, std::size_t n, double tau) {
    double m = in[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, in[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp((in[i] - m) / tau);
    return m / tau + std::log(z);
}

} // namespace lwf3d::kernels
