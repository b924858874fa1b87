#include "lwf3d/tensor.hpp"

#include <cmath>

namespace lwf3d {

std::size_t Tensor::checked_numel(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw shape_error("tensor shape must not be empty");
    std::size_t n = 1;
    for (const std::size_t e : shape) {
        if (e == 0) throw shape_error("tensor extent must be positive, got shape " + shape_string(shape));
        n *= e;
    }
    return n;
}

std::string Tensor::shape_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

bool Tensor::all_finite() const {
    for (const double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw shape_error(std::string(what) + ": shapes differ, " + Tensor::shape_string(a.shape) +
                          " vs " + Tensor::shape_string(b.shape));
    }
}

} // namespace lwf3d
