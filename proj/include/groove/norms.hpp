#pragma once

#include <array>
#include <vector>

#include "groove/linear.hpp"

namespace groove::norms {

// Space-time samples of a field and its first three spatial derivatives:
// d[k][j][i] = (d/dx)^k w(x_i, t_j).
struct SpaceTimeField {
    std::vector<double> x_nodes;
    std::vector<double> t_nodes;  // ascending, in (0, T]
    std::array<std::vector<std::vector<double>>, 4> d;
};

// Discrete Hoelder seminorm: sup over node pairs of |dv| / |dx|^gamma.
double holder_seminorm(const std::vector<double>& values, const std::vector<double>& nodes,
                       double gamma);

// Weighted sup norm over time of the order-3 spatial payload,
//
//   sup_t t^{(2+gamma)/4} [ sum_{k<=3} T^{-(3-k+gamma)/4} |d^k w(t)|_inf
//                           + holder_gamma(d^3 w(t)) ],
//
// with the T-scaled spatial norm chosen so the value is T-independent for
// self-similar fields.
double weighted_b_norm(const SpaceTimeField& f, double gamma, double T);

// Weighted time-Hoelder norm of the order-2 payload: the weighted sup part
//
//   sum_{k<=2} T^{-(2-k)/4} sup_t t^{1/4} |d^k w(t)|_inf
//
// plus the time seminorm
//
//   sum_{k<=2} T^{-(2-k)/4} sup_{s<t} s^{(2+gamma)/4}
//              |d^k w(t) - d^k w(s)|_inf / (t-s)^{(1+gamma)/4}.
//
// All time pairs are used up to 64 nodes; above that each node pairs with its
// 8 nearest successors (the near-diagonal pairs dominate).
double weighted_c_norm(const SpaceTimeField& f, double gamma, double T);

struct NormReport {
    double b_norm = 0.0;
    double c_norm = 0.0;
    double z_norm = 0.0;  // b_norm + c_norm
    double gamma = 0.0;
    double T = 0.0;
};

NormReport report(const SpaceTimeField& f, double gamma, double T);

// Weighted norm of a boundary flux trace b(t) = h(t)/sqrt(t):
// sup_t sqrt(t) |b(t)| plus the time seminorm with weight s^{(3+gamma)/4}.
double trace_norm(const linear::BoundaryTrace& trace, double gamma, double T);

// Space-time samples of the self-similar field t^{1/4} W(x t^{-1/4}) spanned
// by profile arrays given on a uniform y-grid (zero beyond the last node).
// x-grid = y-grid, t_j = T (j/n_t)^4.
SpaceTimeField embed_self_similar(const std::vector<double>& y_nodes,
                                  const std::array<const std::vector<double>*, 4>& w, int n_t,
                                  double T);

}  // namespace groove::norms
