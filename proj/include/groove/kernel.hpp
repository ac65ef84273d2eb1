#pragma once

#include <array>
#include <string>
#include <vector>

#include "groove/chebyshev.hpp"

namespace groove::kernel {

// Scaled profiles of the quartic heat kernel,
//
//   g_k(r) = (1/pi) int_0^inf eta^k exp(-eta^4) cos(r eta + k pi/2) deta,
//
// so that the k-th spatial derivative of the whole-line kernel is
// t^{-(k+1)/4} g_k(x t^{-1/4}). Orders 0..8 are tabulated: orders above the
// public 0..5 range back the time-derivative identity (one t-derivative adds
// four spatial orders) used by the envelope fit.
inline constexpr int kMaxOrder = 8;
inline constexpr double kRMax = 52.0;  // |g_k(kRMax)| < 1e-15 for all orders

struct Envelope {
    double c;   // amplitude
    double nu;  // decay rate in exp(-nu r^{4/3})
};

// Immutable per-order tables: piecewise Chebyshev on fixed breakpoints plus a
// dense uniform resample for cheap evaluation inside convolution loops.
class TableSet {
  public:
    // Builds by direct oscillatory quadrature, or from a previously written
    // cache (same samples, same transform, bit-identical results).
    explicit TableSet(const std::string& cache_path = "");

    static const TableSet& instance();
    // Must be called before the first instance() use to take effect.
    static void set_cache_path(const std::string& path);

    // g_k(r), parity applied, hard zero for |r| > kRMax. Chebyshev path,
    // absolute error <= 1e-12.
    double eval(int k, double r) const;

    // Uniform-grid Lagrange path, absolute error <= 1e-13; used in the
    // convolution hot loops.
    double eval_fast(int k, double r) const;

    // d/dr of the order-k table (spectral differentiation of the pieces).
    double eval_derivative(int k, double r) const;

    // int_R g_k dr computed from the stored representation.
    double moment(int k) const;

    // Sample abscissae/values backing order k (ascending r).
    const std::vector<double>& nodes(int k) const { return nodes_[k]; }
    const std::vector<double>& values(int k) const { return values_[k]; }

    bool loaded_from_cache() const { return from_cache_; }

  private:
    std::array<std::vector<cheb::Series>, kMaxOrder + 1> pieces_;
    std::array<std::vector<cheb::Series>, kMaxOrder + 1> dpieces_;
    std::array<std::vector<double>, kMaxOrder + 1> nodes_;   // ascending
    std::array<std::vector<double>, kMaxOrder + 1> values_;  // matching nodes_
    std::array<std::vector<double>, kMaxOrder + 1> fast_;    // uniform resample
    bool from_cache_ = false;

    double eval_abs(int k, double r_abs) const;
    void build_from_quadrature();
    bool read_cache(const std::string& path);
    void write_cache(const std::string& path) const;
    void finalize();  // series from samples, derivative series, fast grids
};

// g_k(r) via the shared table set. Total on k in 0..kMaxOrder.
double scaled_kernel(int k, double r);

// k-th spatial derivative of the whole-line kernel,
// t^{-(k+1)/4} g_k(x t^{-1/4}); t must be positive.
double g_eval(int k, double x, double t);

// Half-line kernel with even images: G(x-y,t) + G(x+y,t).
double k_eval(double x, double y, double t);

// Direct quadrature for g_k(r); the tables are built from this and tests
// compare against it.
double direct_scaled_quadrature(int k, double r);

// Smallest-amplitude envelope |g_m(r)| <= c (1 + r^{m/3}) exp(-nu r^{4/3}),
// m = 4*ell + k, certified on every tabulated node with r <= r_cap. nu is
// picked from {0.05, 0.10, ..., 1.0}, largest value whose c stays below 1e3.
// Throws if no such pair exists (a table-build defect).
Envelope fit_envelope(int k, int ell, double r_cap = kRMax);

// Defect of the kernel evolution identity at one point: the time derivative
// is evaluated by a dedicated quadrature, the fourth space derivative through
// the tables, and the two must cancel.
double pde_residual(double x, double t);

}  // namespace groove::kernel
