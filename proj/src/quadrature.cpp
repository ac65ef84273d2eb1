#include "groove/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace groove::quad {

namespace {

// Legendre P_n and its derivative by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double pm1 = 1.0, pk = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 1; k < n; ++k) {
        double pk1 = ((2.0 * k + 1.0) * x * pk - k * pm1) / (k + 1.0);
        pm1 = pk;
        pk = pk1;
    }
    p = pk;
    dp = n * (x * pk - pm1) / (x * x - 1.0);
}

Rule make_rule(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n / 2 + n % 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p = 0, dp = 1;
        for (int it = 0; it < 64; ++it) {
            legendre(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre(n, x, p, dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -std::abs(x);
        r.w[i] = w;
        r.x[n - 1 - i] = std::abs(x);
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    if (n < 2 || n > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    static std::map<int, Rule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

double gl(const std::function<double(double)>& f, double a, double b, int n) {
    const Rule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

double panels(const std::function<double(double)>& f, double a, double b, double max_width,
              int n) {
    if (b <= a) return 0.0;
    int m = static_cast<int>(std::ceil((b - a) / max_width));
    if (m < 1) m = 1;
    const double h = (b - a) / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += gl(f, a + i * h, a + (i + 1) * h, n);
    return s;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl(f, a, m, 12);
    const double right = gl(f, m, b, 12);
    const double delta = left + right - whole;
    if (std::abs(delta) <= tol || depth <= 0) return left + right;
    return adaptive_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                int max_depth) {
    if (b <= a) return 0.0;
    return adaptive_rec(f, a, b, gl(f, a, b, 12), abs_tol, max_depth);
}

}  // namespace groove::quad
