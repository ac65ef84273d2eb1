#pragma once

#include <functional>
#include <vector>

namespace groove::cheb {

// Truncated Chebyshev series sum_k c[k] T_k on [a, b].
struct Series {
    double a = -1.0;
    double b = 1.0;
    std::vector<double> c;

    double eval(double x) const;  // Clenshaw
    Series derivative() const;
    double integral() const;  // definite integral over [a, b]
};

// Chebyshev-Lobatto abscissae x_j = midpoint + halfwidth*cos(pi j / n),
// j = 0..n (descending in x).
std::vector<double> lobatto(double a, double b, int n);

// Series through samples f_j taken at lobatto(a, b, n), j = 0..n.
Series from_samples(double a, double b, const std::vector<double>& f);

// Doubles the degree until the trailing coefficients fall below
// tail_tol * max|c|, then trims negligible high-order terms.
Series fit(const std::function<double(double)>& f, double a, double b, double tail_tol,
           int max_degree = 1024);

}  // namespace groove::cheb
