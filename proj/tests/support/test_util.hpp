#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fracscale/tensor.hpp"

namespace fracscale::testing {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> data(element_count(shape));
    for (auto& v : data) v = dist(rng);
    return Tensor(std::move(shape), std::move(data));
}

inline Tensor vec(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor(Shape{n}, std::move(values));
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace fracscale::testing
