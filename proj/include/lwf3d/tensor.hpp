#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lwf3d/errors.hpp"

namespace lwf3d {

// Dense row-major tensor of 64-bit reals. Shapes are lists of positive
// extents; a scalar is represented as shape {1}.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        values.assign(checked_numel(shape), 0.0);
    }

    Tensor(std::vector<std::size_t> s, std::vector<double> v)
        : shape(std::move(s)), values(std::move(v)) {
        if (checked_numel(shape) != values.size()) {
            throw shape_error("tensor value count " + std::to_string(values.size()) +
                              " does not match shape " + shape_string(shape));
        }
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    // 2-D convenience, rows given in order.
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
        return Tensor({rows, cols}, std::move(v));
    }

    std::size_t numel() const { return values.size(); }
    std::size_t rank() const { return shape.size(); }

    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }

    double& at(std::size_t i) { return values[i]; }
    double at(std::size_t i) const { return values[i]; }
    double& at(std::size_t i, std::size_t j) { return values[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * shape[1] + j]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const;
    void fill(double v) { values.assign(values.size(), v); }

    static std::size_t checked_numel(const std::vector<std::size_t>& shape);
    static std::string shape_string(const std::vector<std::size_t>& shape);
};

// Throws shape_error naming both shapes when they differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

} // namespace lwf3d
