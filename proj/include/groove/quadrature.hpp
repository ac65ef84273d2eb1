#pragma once

#include <functional>
#include <vector>

namespace groove::quad {

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Computed once per n (Newton on the Legendre recurrence) and cached.
const Rule& gauss_legendre(int n);

// Single n-point rule over [a, b].
double gl(const std::function<double(double)>& f, double a, double b, int n = 12);

// Uniform panels of width <= max_width, n-point rule per panel. Panels are
// summed left to right so the result is independent of the caller's thread.
double panels(const std::function<double(double)>& f, double a, double b, double max_width,
              int n = 10);

// Bisection-adaptive rule; the error estimate on an interval is the defect
// between one 12-point rule and the sum over its halves.
double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                int max_depth = 52);

}  // namespace groove::quad
