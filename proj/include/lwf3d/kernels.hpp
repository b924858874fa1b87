#pragma once

#include <cstddef>
#include <vector>

#include "lwf3d/tensor.hpp"

namespace lwf3d::kernels {

// out[b x q] = x[b x p] . w[p x q] (+ bias[q] when given).
// Throws shape_error naming both shapes on mismatch.
void matmul_bias(const Tensor& x, const Tensor& w, const Tensor* bias, Tensor& out);

// out[b x r] = a[b x k] . bt[r x k]^T  (row-by-row dot products).
void matmul_nt(const Tensor& a, const Tensor& bt, Tensor& out);

void relu(const Tensor& x, Tensor& out);

// Column-wise max over rows: x[n x c] -> out[c]; argmax keeps the lowest
// row index on exact ties.
void colwise_max(const Tensor& x, Tensor& out, std::vector<std::size_t>& argmax);

// Numerically safe temperature softmax over a contiguous range.
void softmax_scaled(const double* in, double* out, std::size_t n, double tau);

double logsumexp_scaled(const double* in, std::size_t n, double tau);

} // namespace lwf3d::kernels
