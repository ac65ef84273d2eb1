#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace groove::linear {

// Weight of the curvature-squared boundary datum in the linear problem:
// c_beta = 3 tan(beta) / (1 + tan^2(beta)), beta in (0, pi/2).
double c_beta(double beta);

// Scaled profiles of the two linear building blocks. The solution driven by
// the slope condition alone is t^{1/4} * U1hat(x t^{-1/4}); the one driven by
// a unit self-similar boundary flux b(t) = t^{-1/2} is t^{1/4} U2hat(...).
//
//   U1hat(y)    = -(2/pi) int_0^inf (1 - e^{-eta^4}) eta^{-2} cos(y eta) deta
//   U1hat'(y)   = 1 - (2/pi) int_0^inf e^{-eta^4} eta^{-1} sin(y eta) deta
//   U1hat''(y)  = -(2/pi) int_0^inf e^{-eta^4} cos(y eta) deta
//   U1hat'''(y) = (2/pi) int_0^inf eta e^{-eta^4} sin(y eta) deta
//
// Values at y = 0 are direct evaluations of the absolutely convergent forms,
// not extrapolations.
double u1_profile(int k, double y);

// U2hat^{(k)} reduces to weighted integrals of the kernel profiles,
//
//   U2hat^{(k)}(y) = 2 int_0^1 s^{-1/2} (1-s)^{-(k+1)/4} g_k(y (1-s)^{-1/4}) ds
//
// for k <= 2; the third derivative splits off the boundary flux times the
// slope profile, leaving an integrable remainder:
//
//   U2hat'''(y) = U1hat'(y)
//               + 2 int_0^1 (s^{-1/2} - 1)(1-s)^{-1} g_3(y (1-s)^{-1/4}) ds.
double u2_profile(int k, double y);

// Profile form of the full linear solution with boundary flux amplitude B:
// tan(beta) U1hat^{(k)}(y) + c_beta * B * U2hat^{(k)}(y).
double u_linear(int k, double y, double beta, double B);

// Boundary flux trace b(t) stored through its bounded regularization
// h(t) = sqrt(t) b(t); piecewise linear in h between nodes, constant before
// the first node.
struct BoundaryTrace {
    std::vector<double> t_nodes;   // ascending, in (0, T]
    std::vector<double> h_values;  // h = sqrt(t) b(t) >= 0

    BoundaryTrace() = default;
    BoundaryTrace(std::vector<double> t, std::vector<double> h);

    double h_at(double t) const;
    double b_at(double t) const { return h_at(t) / std::sqrt(t); }
    double t_max() const { return t_nodes.empty() ? 0.0 : t_nodes.back(); }
};

// k-th spatial derivative of the flux-driven linear solution for an arbitrary
// trace, by product quadrature in time:
//
//   2 int_0^t b(tau) (t-tau)^{-(k+1)/4} g_k(x (t-tau)^{-1/4}) dtau
//
// with the k = 3 case going through the split above (flux value at t times
// the slope profile plus a difference term tempered by the trace regularity).
double u2_general(const BoundaryTrace& trace, int k, double x, double t);

// The two scaled building blocks and their first three derivatives sampled
// once per grid. The grid is extended internally past length_min until all
// arrays decay below 1e-10 at the last node.
struct LinearProfiles {
    std::vector<double> y_nodes;             // uniform, spacing h
    std::array<std::vector<double>, 4> u1;   // u1[k][i] = U1hat^{(k)}(y_i)
    std::array<std::vector<double>, 4> u2;

    static LinearProfiles build(double h, double length_min);
};

}  // namespace groove::linear
