#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace groove {

// 6-point Lagrange interpolation on a uniform grid x_i = x0 + i*h,
// i = 0..n-1. Outside [x0, x0 + (n-1)h] the nearest sample is returned
// (constant extension).
inline double interp_uniform6(const std::vector<double>& v, double x0, double h, double x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    if (n == 0) return 0.0;
    if (n < 6) {
        // degenerate grids: nearest sample
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::llround((x - x0) / h));
        if (i < 0) i = 0;
        if (i > n - 1) i = n - 1;
        return v[i];
    }
    const double s = (x - x0) / h;
    if (s <= 0.0) return v[0];
    if (s >= static_cast<double>(n - 1)) return v[n - 1];
    std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(s)) - 2;
    if (i0 < 0) i0 = 0;
    if (i0 > n - 6) i0 = n - 6;
    const double t = s - static_cast<double>(i0);
    double out = 0.0;
    for (int j = 0; j < 6; ++j) {
        double lj = 1.0;
        for (int m = 0; m < 6; ++m) {
            if (m == j) continue;
            lj *= (t - m) / static_cast<double>(j - m);
        }
        out += lj * v[i0 + j];
    }
    return out;
}

}  // namespace groove
