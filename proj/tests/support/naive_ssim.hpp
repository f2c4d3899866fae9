#pragma once

#include <cmath>
#include <vector>

#include "fracscale/tensor.hpp"

namespace fracscale::testing {

// Reference SSIM: for every 11x11 window position, builds the 2D Gaussian
// weights directly and computes weighted means, variances and covariance
// from centered sums. Shares no code with fracscale::ssim.
inline double naive_ssim(const Tensor& a, const Tensor& b, double max_value) {
    constexpr int win = 11;
    constexpr double sigma = 1.5;
    double w2d[win][win];
    double total = 0.0;
    for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
            const double dy = i - win / 2;
            const double dx = j - win / 2;
            w2d[i][j] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            total += w2d[i][j];
        }
    }
    for (auto& row : w2d) for (auto& w : row) w /= total;

    const auto rows = static_cast<int>(a.shape()[0]);
    const auto cols = static_cast<int>(a.shape()[1]);
    const double c1 = std::pow(0.01 * max_value, 2);
    const double c2 = std::pow(0.03 * max_value, 2);
    auto at = [cols](const Tensor& t, int y, int x) { return t[static_cast<std::size_t>(y * cols + x)]; };

    double sum = 0.0;
    int count = 0;
    for (int y = 0; y + win <= rows; ++y) {
        for (int x = 0; x + win <= cols; ++x) {
            double ma = 0.0, mb = 0.0;
            for (int i = 0; i < win; ++i) {
                for (int j = 0; j < win; ++j) {
                    ma += w2d[i][j] * at(a, y + i, x + j);
                    mb += w2d[i][j] * at(b, y + i, x + j);
                }
            }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int i = 0; i < win; ++i) {
                for (int j = 0; j < win; ++j) {
                    const double da = at(a, y + i, x + j) - ma;
                    const double db = at(b, y + i, x + j) - mb;
                    va += w2d[i][j] * da * da;
                    vb += w2d[i][j] * db * db;
                    cov += w2d[i][j] * da * db;
                }
            }
            sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return sum / count;
}

} // namespace fracscale::testing
