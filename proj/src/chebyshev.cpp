#include "groove/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace groove::cheb {

double Series::eval(double x) const {
    const double y = (2.0 * x - a - b) / (b - a);
    const double y2 = 2.0 * y;
    double d = 0.0, dd = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        double sv = d;
        d = y2 * d - dd + c[k];
        dd = sv;
    }
    return y * d - dd + (c.empty() ? 0.0 : c[0]);
}

Series Series::derivative() const {
    Series out;
    out.a = a;
    out.b = b;
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) {
        out.c = {0.0};
        return out;
    }
    out.c.assign(n, 0.0);
    double bk1 = 0.0, bk2 = 0.0;  // coefficients of order k+1, k+2
    for (int k = n - 1; k >= 0; --k) {
        double bk = bk2 + 2.0 * (k + 1) * c[k + 1];
        out.c[k] = bk;
        bk2 = bk1;
        bk1 = bk;
    }
    out.c[0] *= 0.5;
    const double scale = 2.0 / (b - a);
    for (double& v : out.c) v *= scale;
    return out;
}

double Series::integral() const {
    // int_{-1}^{1} T_k = 2/(1-k^2) for even k, 0 for odd k.
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); k += 2)
        s += c[k] * 2.0 / (1.0 - static_cast<double>(k) * static_cast<double>(k));
    return s * 0.5 * (b - a);
}

std::vector<double> lobatto(double a, double b, int n) {
    std::vector<double> x(n + 1);
    const double c0 = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int j = 0; j <= n; ++j) x[j] = c0 + h * std::cos(M_PI * j / n);
    return x;
}

Series from_samples(double a, double b, const std::vector<double>& f) {
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 1) throw std::invalid_argument("from_samples: need at least 2 samples");
    Series s;
    s.a = a;
    s.b = b;
    s.c.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double acc = 0.5 * (f[0] + (k % 2 == 0 ? f[n] : -f[n]));
        for (int j = 1; j < n; ++j) acc += f[j] * std::cos(M_PI * j * k / n);
        s.c[k] = 2.0 * acc / n;
    }
    s.c[0] *= 0.5;
    s.c[n] *= 0.5;
    return s;
}

Series fit(const std::function<double(double)>& f, double a, double b, double tail_tol,
           int max_degree) {
    for (int n = 16; n <= max_degree; n *= 2) {
        std::vector<double> x = lobatto(a, b, n);
        std::vector<double> fv(n + 1);
        for (int j = 0; j <= n; ++j) fv[j] = f(x[j]);
        Series s = from_samples(a, b, fv);
        double cmax = 0.0;
        for (double v : s.c) cmax = std::max(cmax, std::abs(v));
        double tail = 0.0;
        const int ntail = std::max(4, n / 8);
        for (int k = n + 1 - ntail; k <= n; ++k) tail = std::max(tail, std::abs(s.c[k]));
        if (tail <= tail_tol * std::max(cmax, 1e-300) || n == max_degree) {
            const double cut = tail_tol * std::max(cmax, 1e-300);
            int keep = static_cast<int>(s.c.size());
            while (keep > 2 && std::abs(s.c[keep - 1]) < cut) --keep;
            s.c.resize(keep);
            return s;
        }
    }
    throw std::runtime_error("cheb::fit: did not reach requested tail");
}

}  // namespace groove::cheb
